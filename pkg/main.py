import json
import logging
import sys

import click
import numpy as np

import console
import estimation
import experiments
import squeeze
import stft
import tfio
from config import load_config
from errors import ComputeError, ConfigError, ParseError

logger = logging.getLogger(__name__)

VERBOSITY = [logging.WARNING, logging.INFO, logging.DEBUG]
EXIT_INTERNAL = 4

# option name -> dotted configuration field
FIELDS = {
    'snr': 'noise.snr_db',
    'seed': 'noise.seed',
    'sigma': 'constant_sigma',
    'components': 'ridges.num_components',
    'report': 'output.report',
}


def _parse_value(text: str):
    try:
        return json.loads(text)
    except ValueError:
        return text


def _overrides(ctx: click.Context, **options) -> dict:
    overrides = dict(ctx.obj['sets'])
    for key, value in options.items():
        if value is not None:
            overrides[FIELDS.get(key, key)] = value
    # --sigma alone means a constant window
    if options.get('sigma') is not None and options.get('policy') is None:
        overrides.setdefault('policy', 'constant')
    return overrides


def _config(ctx: click.Context, **options):
    return load_config(ctx.obj['config'], _overrides(ctx, **options))


def source_options(command):
    command = click.option('--signal', help='Builtin signal name or CSV file.')(command)
    command = click.option('--snr', type=float, help='Add white noise at this SNR (dB).')(command)
    command = click.option('--seed', type=int, help='Noise seed.')(command)
    return command


def sigma_options(command):
    command = click.option('--policy', help='sigma policy, e.g. constant, sigma2, sigma_est2.')(command)
    command = click.option('--sigma', type=float, help='Window width for the constant policy.')(command)
    return command


def _output(dir_okay=False):
    return click.Path(dir_okay=dir_okay, writable=True)


@click.group()
@click.option('-v', '--verbose', count=True, help='-v for progress, -vv for debugging output.')
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
              help='JSON configuration merged over the defaults.')
@click.option('--set', 'sets', multiple=True, metavar='KEY=VALUE',
              help='Override one configuration field, e.g. --set estimator.gamma1=0.4.')
@click.pass_context
def cli(ctx, verbose, config_path, sets):
    """Adaptive synchrosqueezing with a time-varying window width."""
    logging.basicConfig(level=VERBOSITY[min(verbose, len(VERBOSITY) - 1)],
                        format='%(levelname)s %(name)s: %(message)s')
    parsed = {}
    for item in sets:
        key, separator, value = item.partition('=')
        if not separator:
            raise click.BadParameter('expected KEY=VALUE, got {!r}'.format(item), param_hint='--set')
        parsed[key.strip()] = _parse_value(value)
    ctx.obj = {'config': config_path, 'sets': parsed}


@cli.command()
@source_options
@click.argument('out', type=_output())
@click.pass_context
def synth(ctx, out, **options):
    """Write the configured signal as CSV."""
    config = _config(ctx, **options)
    signal, _ = experiments.load_source(config)
    tfio.write_signal_csv(signal, out)


@cli.command(name='stft')
@source_options
@sigma_options
@click.argument('out', type=_output())
@click.pass_context
def stft_command(ctx, out, **options):
    """Export |adaptive STFT| as CSV or PGM (by extension)."""
    config = _config(ctx, **options)
    signal, components = experiments.load_source(config)
    sigma = experiments.select_sigma(signal, components, config)
    tfio.export_tf(stft.adaptive_stft(signal, sigma, epsilon=config.epsilon, nfft=config.nfft), out)


@cli.command()
@source_options
@sigma_options
@click.option('--variant', help='FSST, FSST2, ADP_FSST, ADP_FSST2, REGULAR_PT_ADP or REGULAR_PT_ADP2.')
@click.argument('out', type=_output())
@click.pass_context
def fsst(ctx, out, **options):
    """Export the squeezed transform as CSV or PGM (by extension)."""
    config = _config(ctx, **options)
    signal, components = experiments.load_source(config)
    sigma = experiments.select_sigma(signal, components, config)
    sst = squeeze.synchrosqueeze(signal, sigma, config.variant, config.epsilon, config.nfft, config.threshold)
    tfio.export_tf(sst, out)


@cli.command(name='select-sigma')
@source_options
@sigma_options
@click.argument('out', type=_output())
@click.pass_context
def select_sigma(ctx, out, **options):
    """Write the sigma track of the configured policy as CSV."""
    config = _config(ctx, **options)
    signal, components = experiments.load_source(config)
    sigma = experiments.select_sigma(signal, components, config)
    tfio.write_track_csv(signal.times, sigma.sigma, out, 'sigma')
    click.echo(f"sigma in [{sigma.sigma.min():.4g}, {sigma.sigma.max():.4g}] s")


@cli.command()
@source_options
@sigma_options
@click.option('--variant')
@click.option('--components', type=int, help='Number of ridges to extract.')
@click.argument('out', type=_output())
@click.pass_context
def ridge(ctx, out, **options):
    """Write the extracted ridges in Hz (one column per ridge, empty where absent)."""
    config = _config(ctx, **options)
    signal, components = experiments.load_source(config)
    result = experiments.separate(signal, components, config)
    found = result.ridges
    columns = [signal.times] + [found.frequencies(k) for k in range(len(found))]
    header = ','.join(['time'] + ['ridge{}'.format(k) for k in range(len(found))])
    np.savetxt(out, np.column_stack(columns), fmt='%.17g', delimiter=',', header=header, comments='')
    if found.exhausted:
        click.echo(f"only {len(found)} ridge(s) found", err=True)


@cli.command()
@source_options
@sigma_options
@click.option('--variant')
@click.option('--components', type=int)
@click.argument('prefix', type=_output())
@click.pass_context
def reconstruct(ctx, prefix, **options):
    """Write each recovered mode as PREFIX_<k>.csv."""
    config = _config(ctx, **options)
    signal, components = experiments.load_source(config)
    result = experiments.separate(signal, components, config)
    for k, mode in enumerate(result.reconstructed):
        tfio.write_signal_csv(mode, f"{prefix}_{k}.csv")
    if result.rmse is not None:
        click.echo(f"RMSE: {result.rmse:.4g}")


@cli.command()
@source_options
@sigma_options
@click.option('--variant')
@click.argument('out', type=_output())
@click.pass_context
def entropy(ctx, out, **options):
    """Write the local Renyi entropy of the squeezed transform per time."""
    config = _config(ctx, **options)
    signal, components = experiments.load_source(config)
    sigma = experiments.select_sigma(signal, components, config)
    sst = squeeze.synchrosqueeze(signal, sigma, config.variant, config.epsilon, config.nfft, config.threshold)
    magnitude, _ = sst.nonnegative()
    curve = estimation.renyi_entropy_curve(magnitude, config.estimator.renyi_zeta, config.estimator.renyi_ell)
    tfio.write_track_csv(signal.times, curve, out, 'entropy')


@cli.command()
@source_options
@sigma_options
@click.option('--variant')
@click.option('--report', type=_output(), help='Where to write the JSON report.')
@click.option('--workers', type=int, help='Benchmark processes, 0 for one per CPU.')
@click.pass_context
def experiment(ctx, **options):
    """Run the configured pipeline (and benchmark) and write a JSON report."""
    config = _config(ctx, **options)
    report = experiments.run_experiment(config)
    if config.output.report:
        report['artifacts']['report'] = config.output.report
        tfio.write_report(report, config.output.report)
    click.echo(console.show_report(report))


def main(argv=None) -> int:
    """Runs the command line; returns 0, 1 when aborted, 2 for bad input or configuration,
    3 for compute errors and 4 for anything unexpected."""
    try:
        cli.main(args=argv, prog_name='adaptive-sst', standalone_mode=False)
    except (ConfigError, ParseError) as e:
        click.echo(f"error: {e}", err=True)
        return 2
    except click.ClickException as e:
        e.show()
        return 2
    except click.Abort:
        return 1
    except ComputeError as e:
        click.echo(f"error: {e}", err=True)
        return 3
    except Exception as e:
        logger.debug('unexpected failure', exc_info=True)
        click.echo(f"internal error: {type(e).__name__}: {e}", err=True)
        return EXIT_INTERNAL
    return 0


if __name__ == '__main__':
    sys.exit(main())
