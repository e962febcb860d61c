from .fixed import policy as constant
from .oracle import sigma1_policy as sigma1, sigma2_policy as sigma2
from .estimated import sigma_u, sigma_est, sigma_est2, sigma_re, sigma_re2

POLICIES = {
    'constant': constant,
    'sigma1': sigma1,
    'sigma2': sigma2,
    'sigma_u': sigma_u,
    'sigma_est': sigma_est,
    'sigma_est2': sigma_est2,
    'sigma_re': sigma_re,
    'sigma_re2': sigma_re2,
}
