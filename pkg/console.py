import blessed
from tabulate import tabulate

terminal = blessed.Terminal()

GOOD_IF_ERROR_BINS = 1.0


def _number(value, digits=4) -> str:
    return 'n/a' if value is None else f"{value:.{digits}g}"


def show_signal(report: dict) -> str:
    signal = report['signal']
    noise = 'noiseless' if signal['snr_db'] is None else f"SNR {signal['snr_db']} dB (seed {signal['seed']})"
    return '\n'.join([
        f"Signal: {signal['source']} ({signal['samples']} samples at {signal['sample_rate']:g} Hz, {noise})",
        f"Transform: {report['variant']} with sigma policy {report['policy']}"])


def show_sigma(report: dict) -> str:
    sigma = report['sigma']
    return tabulate([[_number(sigma['min']), _number(sigma['mean']), _number(sigma['max'])]],
                    headers=['sigma min', 'sigma mean', 'sigma max'])


def show_ridges(report: dict) -> str:
    ridges = report['ridges']

    def color(error):
        if error is None:
            return 'n/a'
        text = _number(error, 3)
        return terminal.green(text) if error <= GOOD_IF_ERROR_BINS else terminal.red(text)

    lines = [f"Ridges: {ridges['count']}" + (' (residual exhausted)' if ridges['exhausted'] else '')]
    if 'matches' in ridges:
        lines.append(tabulate(
            [[m['ridge'], m['component'], color(m['median_if_error_bins'])] for m in ridges['matches']],
            headers=['ridge', 'component', 'median IF error (bins)']))
    if report.get('rmse') is not None:
        lines.append(f"RMSE: {_number(report['rmse'])}")
    return '\n'.join(lines)


def show_benchmark(benchmark: dict) -> str:
    rows = [[f"Method {method}"] + [_number(v) for v in values]
            for method, values in sorted(benchmark['rmse'].items())]
    return '\n'.join([
        f"Mean RMSE over {benchmark['runs']} run(s)",
        tabulate(rows, headers=['SNR (dB)'] + [f"{snr:g}" for snr in benchmark['snr_db']])])


def show_report(report: dict) -> str:
    sections = [show_signal(report), show_sigma(report), show_ridges(report)]
    if 'benchmark' in report:
        sections.append(show_benchmark(report['benchmark']))
    return '\n\n'.join(sections)
