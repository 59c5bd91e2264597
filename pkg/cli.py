# cli.py
"""
``sadic``: construct, check and analyse S-adic subshifts from the command line.

Exit codes: 0 success or check passed, 1 a property check failed, 2 invalid
input or unmet preconditions.
"""
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import click
from dotenv import load_dotenv

from analysis import (asymptotic_pair_windows, complexity_table, language,
                      render_pair_window, right_special_report, signal_audit,
                      windows_allowed)
from bratteli import (BratteliDiagram, IntertwiningCertificate,
                      OrderedBratteliDiagram, enumerate_paths,
                      intertwining_failures, minimal_path, check_proper_ordering,
                      telescope, vershik_orbit)
from config import config
from constructions import (PropertyFailure, amplify_diagram, build_pinf_sequence,
                           build_pk_sequence, build_subexp_family,
                           build_toeplitz_sequence, check_ds_classes, check_pinf,
                           check_pk, check_toeplitz, parse_growth)
from core_words import DirectiveSequence, render_word
from demos import DemoName, demo_construction, demo_diagram
from utils.exceptions import AppException, ValidationError
from utils.serializers import (dump_csv, dump_json, load_json, load_model,
                               read_growth_table)

logger = logging.getLogger('sadic')

FORMATS = ('json', 'csv', 'text')
POSITIVE_PARAMS = ('k', 'levels', 'm_max', 'depth', 'n_max', 'alpha_cap', 'i', 'n', 'limit')


def settings():
    return config[os.environ.get('SADIC_CONFIG') or 'default']


# ==================== RUN CONFIGURATION ====================
@dataclass
class RunConfig:
    command: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    csv_path: Optional[str] = None
    fmt: str = 'json'
    seed_demo: Optional[str] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.fmt not in FORMATS:
            raise ValidationError(f"Unknown format '{self.fmt}'.", field='format')
        if self.input_path:
            source = os.path.abspath(self.input_path)
            for target in (self.output_path, self.csv_path):
                if target and os.path.abspath(target) == source:
                    raise ValidationError("Output path must differ from the input path.", field='out')
        for name in POSITIVE_PARAMS:
            value = self.params.get(name)
            if value is not None and value < 1:
                raise ValidationError(f"--{name.replace('_', '-')} must be positive, got {value}.", field=name)


def _run_config(ctx, source=None, out=None, fmt='json', csv_path=None, seed_demo=None, **params):
    return RunConfig(ctx.command_path, source, out, csv_path, fmt, seed_demo, params)


def _emit(run: RunConfig, payload, text=None, header=None, rows=None):
    if run.csv_path:
        if rows is None:
            raise ValidationError(f"'{run.command}' has no CSV form.", field='csv')
        dump_csv(header, rows, run.csv_path)
    if run.fmt == 'csv':
        if rows is None:
            raise ValidationError(f"'{run.command}' has no CSV form.", field='format')
        body = dump_csv(header, rows)
    elif run.fmt == 'text' and text is not None:
        body = text if text.endswith('\n') else text + '\n'
    else:
        body = dump_json(payload)
    if run.output_path:
        with open(run.output_path, 'w', encoding='utf-8') as handle:
            handle.write(body)
    else:
        click.echo(body, nl=False)


# ==================== INPUTS ====================
def _demo_kwargs():
    s = settings()
    return {'levels': s.DEMO_LEVELS, 'subexp_alpha_cap': s.SUBEXP_ALPHA_CAP,
            'subexp_max_image_length': s.SUBEXP_MAX_IMAGE_LENGTH}


def load_sequence(run: RunConfig) -> DirectiveSequence:
    """A sequence file, a construction file holding ``sequence``, or a demo."""
    if run.seed_demo:
        return demo_construction(run.seed_demo, **_demo_kwargs()).sequence
    if not run.input_path:
        raise ValidationError("Give a sequence file or --seed-demo.", field='input')
    data = load_json(run.input_path)
    location = f'{run.input_path}:$'
    if isinstance(data, dict) and 'sequence' in data:
        data, location = data['sequence'], f'{location}.sequence'
    return DirectiveSequence.from_dict(data, location=location)


def load_diagram(run: RunConfig) -> BratteliDiagram:
    if run.seed_demo:
        return demo_diagram(run.seed_demo, settings().DEMO_LEVELS)
    if not run.input_path:
        raise ValidationError("Give --diagram or --seed-demo.", field='diagram')
    return load_model(run.input_path, BratteliDiagram)


def load_ordered(run: RunConfig) -> OrderedBratteliDiagram:
    if run.seed_demo:
        ordered = demo_construction(run.seed_demo, **_demo_kwargs()).ordered
        if ordered is None:
            raise ValidationError(f"Demo '{run.seed_demo}' has no ordered diagram.", field='seed_demo')
        return ordered
    if not run.input_path:
        raise ValidationError("Give an ordered diagram file or --seed-demo.", field='input')
    data = load_json(run.input_path)
    location = f'{run.input_path}:$'
    if isinstance(data, dict) and 'ordered_diagram' in data:
        data, location = data['ordered_diagram'], f'{location}.ordered_diagram'
    return OrderedBratteliDiagram.from_dict(data, location=location)


def _truncate(d: BratteliDiagram, levels):
    return d if levels is None else d.truncated(levels)


# ==================== TEXT RENDERING ====================
def render_sequence(t: DirectiveSequence) -> str:
    lines = [f"# {t.name or 'sequence'}: {len(t)} morphisms"]
    for n, tau in enumerate(t.morphisms):
        lines.append(f"tau_{n}:")
        for u, image in enumerate(tau.images, start=1):
            lines.append(f"  v{u} -> {render_word(image)}")
    return '\n'.join(lines)


def render_verdict(verdict) -> str:
    if isinstance(verdict, PropertyFailure):
        return f"FAIL clause {verdict.clause} at level {verdict.level}: {verdict.message}"
    return f"PASS on {verdict.levels} levels"


def _render_branch(branch) -> str:
    label = 'unsignalled' if branch.signal is None else f"signal v{branch.signal}"
    line = f"  {label}: {len(branch.profiles)} words, degree {branch.degree}"
    first = branch.profiles[0]
    if first.levels:
        line += f", level 1 {first.levels[0].to_dict()['rendered']}, signals {list(first.signals)}"
    return line


def _verdict_exit(verdict) -> int:
    return 1 if isinstance(verdict, PropertyFailure) else 0


# ==================== COMMAND GROUP ====================
def report_options(f):
    f = click.option('--format', 'fmt', type=click.Choice(FORMATS), default='json', show_default=True,
                     help='Report format.')(f)
    f = click.option('--out', type=click.Path(dir_okay=False), default=None,
                     help='Write the report to a file instead of stdout.')(f)
    return f


def demo_option(f):
    return click.option('--seed-demo', type=click.Choice(DemoName.all()), default=None,
                        help='Use a built-in demo instead of an input file.')(f)


@click.group(name='sadic')
@click.version_option(version=config['default'].APP_VERSION, prog_name='sadic')
def cli():
    """S-adic subshifts with prescribed asymptotic components."""
    s = settings()
    logging.basicConfig(level=s.LOG_LEVEL, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


@cli.group()
def construct():
    """Build directive sequences from Bratteli diagrams."""


@cli.group()
def check():
    """Validate properties; exit 1 when one fails."""


@cli.group()
def analyze():
    """Languages, complexity, right-special factors and signals."""


# ==================== CONSTRUCT ====================
@construct.command('pk')
@click.option('--k', type=int, required=True, help='Number of asymptotic components.')
@click.option('--diagram', 'source', type=click.Path(dir_okay=False), default=None)
@click.option('--levels', type=int, default=None, help='Use only the first levels of the diagram.')
@click.option('--amplify', is_flag=True, help='Amplify the diagram first (keeps the SOE class).')
@demo_option
@report_options
@click.pass_context
def construct_pk(ctx, k, source, levels, amplify, seed_demo, out, fmt):
    """Order a diagram with Property (P_k) and read its morphisms."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, k=k, levels=levels)
    result = build_pk_sequence(_truncate(load_diagram(run), levels), k, amplify=amplify)
    _emit(run, result.to_dict(), text=render_sequence(result.sequence))
    return 0


@construct.command('pinf')
@click.option('--diagram', 'source', type=click.Path(dir_okay=False), default=None)
@click.option('--levels', type=int, default=None)
@click.option('--amplify', is_flag=True)
@demo_option
@report_options
@click.pass_context
def construct_pinf(ctx, source, levels, amplify, seed_demo, out, fmt):
    """Order a diagram with Property (P_∞) and read its morphisms."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, levels=levels)
    result = build_pinf_sequence(_truncate(load_diagram(run), levels), amplify=amplify)
    _emit(run, result.to_dict(), text=render_sequence(result.sequence))
    return 0


@construct.command('toeplitz')
@click.option('--k', type=int, required=True)
@click.option('--diagram', 'source', type=click.Path(dir_okay=False), default=None)
@click.option('--levels', type=int, default=None)
@demo_option
@report_options
@click.pass_context
def construct_toeplitz(ctx, k, source, levels, seed_demo, out, fmt):
    """Toeplitz-preserving morphisms on an equal-row-sum diagram."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, k=k, levels=levels)
    result = build_toeplitz_sequence(_truncate(load_diagram(run), levels), k)
    _emit(run, result.to_dict(), text=render_sequence(result.sequence))
    return 0


@construct.command('subexp')
@click.option('--g', 'growth', default='pow2_sqrt', show_default=True,
              help="pow2_sqrt, poly:<d> or a CSV file with columns n,g.")
@click.option('--levels', type=int, default=1, show_default=True)
@click.option('--alpha-cap', type=int, default=None)
@report_options
@click.pass_context
def construct_subexp(ctx, growth, levels, alpha_cap, out, fmt):
    """The subexponential-complexity family for a growth sequence."""
    s = settings()
    run = _run_config(ctx, None, out, fmt, levels=levels, alpha_cap=alpha_cap)
    table = read_growth_table(growth) if growth.endswith('.csv') else None
    sequence, spec = build_subexp_family(parse_growth(growth, table), levels,
                                         alpha_cap or s.SUBEXP_ALPHA_CAP, s.SUBEXP_MAX_IMAGE_LENGTH)
    _emit(run, {'sequence': sequence.to_dict(), 'subexp': spec.to_dict()}, text=render_sequence(sequence))
    return 0


@cli.command('amplify')
@click.option('--k', type=int, required=True)
@click.option('--diagram', 'source', type=click.Path(dir_okay=False), default=None)
@click.option('--margin', type=int, default=1, show_default=True, help='Level margin of the copy sizes.')
@demo_option
@report_options
@click.pass_context
def amplify(ctx, k, source, margin, seed_demo, out, fmt):
    """Telescope and split vertices; emits the derived diagram and its certificate."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, k=k)
    original = load_diagram(run)
    derived, certificate = amplify_diagram(original, k, level_margin=margin)
    payload = {'original': original.to_dict(), 'diagram': derived.to_dict(), 'certificate': certificate.to_dict()}
    text = (f"kept levels {list(certificate.keep)}\n"
            f"sizes {list(derived.level_sizes)}")
    _emit(run, payload, text=text)
    return 0


# ==================== CHECK ====================
@check.command('pk')
@click.option('--k', type=int, required=True)
@click.option('--levels', type=int, default=None)
@click.argument('source', type=click.Path(dir_okay=False), required=False)
@demo_option
@report_options
@click.pass_context
def check_pk_command(ctx, k, levels, source, seed_demo, out, fmt):
    """Property (P_k): witness or the first violated clause."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, k=k, levels=levels)
    verdict = check_pk(load_sequence(run), k, levels)
    _emit(run, verdict.to_dict(), text=render_verdict(verdict))
    return _verdict_exit(verdict)


@check.command('pinf')
@click.option('--levels', type=int, default=None)
@click.argument('source', type=click.Path(dir_okay=False), required=False)
@demo_option
@report_options
@click.pass_context
def check_pinf_command(ctx, levels, source, seed_demo, out, fmt):
    """Property (P_∞)."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, levels=levels)
    verdict = check_pinf(load_sequence(run), levels)
    _emit(run, verdict.to_dict(), text=render_verdict(verdict))
    return _verdict_exit(verdict)


@check.command('toeplitz')
@click.option('--k', type=int, required=True)
@click.option('--levels', type=int, default=None)
@click.argument('source', type=click.Path(dir_okay=False), required=False)
@demo_option
@report_options
@click.pass_context
def check_toeplitz_command(ctx, k, levels, source, seed_demo, out, fmt):
    """Toeplitz recipe, equal lengths and the class conditions."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, k=k, levels=levels)
    t = load_sequence(run)
    verdict = check_toeplitz(t, k, levels)
    if not isinstance(verdict, PropertyFailure):
        verdict = check_ds_classes(t, k, levels) or verdict
    _emit(run, verdict.to_dict(), text=render_verdict(verdict))
    return _verdict_exit(verdict)


@check.command('proper')
@click.option('--depth', type=int, required=True)
@click.argument('source', type=click.Path(dir_okay=False), required=False)
@demo_option
@report_options
@click.pass_context
def check_proper(ctx, depth, source, seed_demo, out, fmt):
    """Unique maximal and minimal chains on the first ``depth`` levels."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, depth=depth)
    proper = check_proper_ordering(load_ordered(run), depth)
    _emit(run, {'passed': proper, 'depth': depth}, text='PASS' if proper else 'FAIL')
    return 0 if proper else 1


@check.command('intertwine')
@click.argument('source', type=click.Path(dir_okay=False))
@report_options
@click.pass_context
def check_intertwine(ctx, source, out, fmt):
    """C_n B_n = A_n and B_{n+1} C_n = M_n for an amplify report."""
    run = _run_config(ctx, source, out, fmt)
    data = load_json(source)
    if not isinstance(data, dict) or not all(key in data for key in ('original', 'diagram', 'certificate')):
        raise ValidationError("Amplify report needs 'original', 'diagram' and 'certificate'.", field=f'{source}:$')
    original = BratteliDiagram.from_dict(data['original'], location=f'{source}:$.original')
    derived = BratteliDiagram.from_dict(data['diagram'], location=f'{source}:$.diagram')
    certificate = IntertwiningCertificate.from_dict(data['certificate'], location=f'{source}:$.certificate')
    failures = intertwining_failures(original, derived, certificate)
    _emit(run, {'passed': not failures, 'failures': failures},
          text='PASS' if not failures else '\n'.join(failures))
    return 1 if failures else 0


# ==================== ANALYZE ====================
@analyze.command('language')
@click.option('--m', 'length', type=int, required=True, help='Word length.')
@click.option('--level', type=int, default=0, show_default=True)
@click.argument('source', type=click.Path(dir_okay=False), required=False)
@demo_option
@report_options
@click.pass_context
def analyze_language(ctx, length, level, source, seed_demo, out, fmt):
    """Allowed words of one length, sorted."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo)
    if length < 0:
        raise ValidationError(f"--m must be non-negative, got {length}.", field='m')
    words = sorted(language(load_sequence(run), length, level))
    _emit(run, {'level': level, 'm': length, 'count': len(words), 'words': [list(w) for w in words]},
          text='\n'.join(' '.join(map(str, w)) for w in words),
          header=['word'], rows=[[' '.join(map(str, w))] for w in words])
    return 0


@analyze.command('complexity')
@click.option('--m-max', type=int, default=None)
@click.option('--level', type=int, default=0, show_default=True)
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), default=None,
              help='Also write the m,p,h table to this file.')
@click.argument('source', type=click.Path(dir_okay=False), required=False)
@demo_option
@report_options
@click.pass_context
def analyze_complexity(ctx, m_max, level, csv_path, source, seed_demo, out, fmt):
    """Factor complexity p(m) and h_m = ln p(m) / m."""
    s = settings()
    m_max = m_max or s.DEFAULT_M_MAX
    run = _run_config(ctx, source, out, fmt, csv_path=csv_path, seed_demo=seed_demo, m_max=m_max)
    rows = complexity_table(load_sequence(run), m_max, level, workers=s.LANGUAGE_WORKERS,
                            max_text_length=s.MAX_TEXT_LENGTH)
    _emit(run, {'level': level, 'rows': [row.to_dict() for row in rows]},
          text='\n'.join(f"{row.m:>5} {row.p:>10} {row.h:.6f}" for row in rows),
          header=['m', 'p', 'h'], rows=[[row.m, row.p, repr(row.h)] for row in rows])
    return 0


@analyze.command('asymptotic')
@click.option('--m-max', type=int, default=None)
@click.option('--gap', type=int, default=None, help='Stability gap; defaults to a quarter of m-max.')
@click.option('--level', type=int, default=0, show_default=True)
@click.option('--words', is_flag=True, help='Include every right-special word in the report.')
@click.argument('source', type=click.Path(dir_okay=False), required=False)
@demo_option
@report_options
@click.pass_context
def analyze_asymptotic(ctx, m_max, gap, level, words, source, seed_demo, out, fmt):
    """Right-special factors and the stable bifurcation branches."""
    s = settings()
    m_max = m_max or s.DEFAULT_M_MAX
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, m_max=m_max)
    report = right_special_report(load_sequence(run), m_max, gap, level,
                                  gap_fraction=s.STABILITY_GAP_FRACTION, lift_depth=s.LIFT_DEPTH,
                                  budget=s.PAIR_FIXPOINT_BUDGET, workers=s.LANGUAGE_WORKERS,
                                  max_text_length=s.MAX_TEXT_LENGTH)
    text = '\n'.join(
        [f"stabilized branches {report.stabilized_branches}, degrees {report.branch_degrees}",
         f"suffix branches {report.suffix_branches} (gap {report.gap})",
         f"complexity identity {'holds' if report.identity_holds else 'fails'}"]
        + [_render_branch(b) for b in report.branches]
    )
    rows = [[entry['m'], entry['p'], entry['special']] for entry in report.to_dict()['entries']]
    _emit(run, report.to_dict(include_words=words), text=text, header=['m', 'p', 'special'], rows=rows)
    return 0


@analyze.command('signals')
@click.option('--mode', default='1', show_default=True, help="k, or 'inf' for Property (P_∞).")
@click.option('--n-max', type=int, default=3, show_default=True)
@click.option('--m-max', type=int, default=None, help='Length of the right-special words audited.')
@click.option('--gap', type=int, default=None, help='Stability gap; defaults to a quarter of m-max.')
@click.argument('source', type=click.Path(dir_okay=False), required=False)
@demo_option
@report_options
@click.pass_context
def analyze_signals(ctx, mode, n_max, m_max, gap, source, seed_demo, out, fmt):
    """Audit bifurcation signals, followers and contexts level by level."""
    s = settings()
    m_max = m_max or s.DEFAULT_M_MAX
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, n_max=n_max, m_max=m_max)
    audit = signal_audit(load_sequence(run), mode, n_max, m_max, gap, gap_fraction=s.STABILITY_GAP_FRACTION,
                         workers=s.LANGUAGE_WORKERS, max_text_length=s.MAX_TEXT_LENGTH,
                         budget=s.PAIR_FIXPOINT_BUDGET)
    lines = [f"{'PASS' if audit.passed else 'FAIL'}: {len(audit.entries)} bifurcations of "
             f"{len(audit.profiles)} words on levels 1..{n_max}"]
    lines += [f"  level {e.bifurcation.level}: {e.bifurcation.to_dict()['rendered']} "
              f"{'ok' if e.ok else '; '.join(e.problems)}"
              for e in audit.entries]
    _emit(run, audit.to_dict(), text='\n'.join(lines))
    return 0 if audit.passed else 1


# ==================== PAIRS, PATHS, TELESCOPING ====================
@cli.command('pairs')
@click.option('--i', 'component', type=int, required=True, help='Component index.')
@click.option('--n', 'level', type=int, required=True, help='Level of the window.')
@click.option('--mode', default='1', show_default=True, help="k, or 'inf'.")
@click.option('--radius', type=int, default=12, show_default=True, help='Half width of the text rendering.')
@click.argument('source', type=click.Path(dir_okay=False), required=False)
@demo_option
@report_options
@click.pass_context
def pairs(ctx, component, level, mode, radius, source, seed_demo, out, fmt):
    """Windows of the i-th left-asymptotic pair at level n."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, i=component, n=level)
    t = load_sequence(run)
    window = asymptotic_pair_windows(t, component, level, mode, max_window_length=settings().MAX_WINDOW_LENGTH)
    payload = window.to_dict()
    payload['agree_before_zero'] = window.agree_before_zero()
    payload['differ_at_zero'] = window.differ_at_zero()
    payload['allowed'] = windows_allowed(t, window)
    _emit(run, payload, text=render_pair_window(window, radius))
    passed = payload['agree_before_zero'] and payload['differ_at_zero'] and payload['allowed']
    return 0 if passed else 1


@cli.command('vershik')
@click.option('--depth', type=int, required=True)
@click.option('--vertex', type=int, default=None, help='Only paths ending at this vertex.')
@click.option('--limit', type=int, default=None)
@click.argument('source', type=click.Path(dir_okay=False), required=False)
@demo_option
@report_options
@click.pass_context
def vershik(ctx, depth, vertex, limit, source, seed_demo, out, fmt):
    """Vershik orbits from the minimal paths into each vertex at ``depth``."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo, depth=depth, limit=limit)
    b = load_ordered(run)
    vertices = [vertex] if vertex else list(range(1, b.diagram.size(depth) + 1))
    orbits, exhaustive = [], True
    for u in vertices:
        orbit = vershik_orbit(b, minimal_path(b, depth, u), limit)
        expected = enumerate_paths(b, depth, u)
        complete = limit is None or len(orbit) < limit
        if complete and sorted(p.edges for p in orbit) != sorted(p.edges for p in expected):
            exhaustive = False
        orbits.append({'vertex': u, 'count': len(orbit), 'paths': [p.to_dict()['edges'] for p in orbit]})
    payload = {'depth': depth, 'exhaustive': exhaustive, 'orbits': orbits}
    text = '\n'.join(f"vertex {o['vertex']}: {o['count']} paths" for o in orbits)
    _emit(run, payload, text=text)
    return 0 if exhaustive else 1


@cli.command('telescope')
@click.option('--keep', required=True, help='Comma separated levels, starting with 0.')
@click.option('--diagram', 'source', type=click.Path(dir_okay=False), default=None)
@demo_option
@report_options
@click.pass_context
def telescope_command(ctx, keep, source, seed_demo, out, fmt):
    """Collapse the levels between the kept ones."""
    run = _run_config(ctx, source, out, fmt, seed_demo=seed_demo)
    try:
        levels = [int(x) for x in keep.split(',') if x.strip()]
    except ValueError:
        raise ValidationError(f"--keep must list integers, got '{keep}'.", field='keep')
    result = telescope(load_diagram(run), levels)
    _emit(run, result.to_dict(), text=f"sizes {list(result.level_sizes)}")
    return 0


# ==================== ENTRY POINT ====================
def run(argv=None) -> int:
    """Invoke ``sadic`` and map the outcome to the exit-code contract."""
    load_dotenv()
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name='sadic', standalone_mode=False)
    except click.exceptions.Abort:
        click.echo('Aborted.', err=True)
        return 2
    except click.ClickException as e:
        e.show()
        return 2
    except AppException as e:
        click.echo(dump_json(e.to_dict()), err=True, nl=False)
        logger.debug(f"{e.__class__.__name__}: {e.message}")
        return e.exit_code
    return rv if isinstance(rv, int) else 0


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
