"""Config parsing, run orchestration, and bit-stable file output.

Config files are flat ``key = value`` text with ``#`` comments.  Reports and
snapshots are comma-separated tables whose bytes depend only on the config;
the optional full-f dump is a small binary format documented at
:func:`write_f_dump`.
"""

from __future__ import annotations

import argparse
import json
import struct
import sys
import time
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import stability_report
from .harness import ConvergenceReport, convergence_study
from .solver import (
    DiagnosticsLog,
    PerturbedMaxwellianIC,
    SimulationState,
    SolverConfig,
    TabulatedIC,
    UniformMaxwellianIC,
    run,
)

#: Levels used by ``study`` when the config does not say (the ladder
#: (n_x, n_v) -> 16x the base resolution, e.g. (40,80) -> (640,1280)).
DEFAULT_STUDY_LEVELS = 5

F_DUMP_MAGIC = b"VPBGKF01"


class ConfigError(ValueError):
    """Invalid config file; the message lists every problem found."""


@dataclass(frozen=True)
class StudyConfig:
    """A solver config plus the number of nested refinement levels."""

    base: SolverConfig
    levels: int

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError(f"levels must be >= 2, got {self.levels}")


_REQUIRED_KEYS = ("n_x", "n_v", "v_max", "eps", "t_final", "sigma",
                  "initial_condition")

_BOOL_KEYS = ("fixed_dt", "force_zero_field", "transport_only",
              "compensated_moments")

_KNOWN_KEYS = _REQUIRED_KEYS + _BOOL_KEYS + (
    "diagnostics_every", "q_list", "levels", "ic_rho", "ic_u", "ic_temp",
    "ic_path",
)

_IC_TAGS = ("paper_test", "uniform_maxwellian", "tabulated")


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean (true/false), got {raw!r}")


def parse_config(path) -> SolverConfig | StudyConfig:
    """Parse and validate a flat key = value config file.

    Returns a StudyConfig when the file sets ``levels``, else a SolverConfig.
    All problems (unknown keys, bad values, missing keys) are collected and
    reported together with their line numbers.
    """
    path = Path(path)
    text = path.read_text()

    entries: dict[str, tuple[str, int]] = {}
    problems: list[str] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value', got {raw_line.strip()!r}")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in entries:
            problems.append(f"line {lineno}: duplicate key {key!r} "
                            f"(first set on line {entries[key][1]})")
            continue
        entries[key] = (value, lineno)

    missing = [k for k in _REQUIRED_KEYS if k not in entries]
    if missing:
        problems.append("missing required keys: " + ", ".join(missing))

    def take(key, conv, default=None):
        if key not in entries:
            return default
        value, lineno = entries[key]
        try:
            return conv(value)
        except ValueError as err:
            problems.append(f"line {lineno}: {key}: {err}")
            return default

    n_x = take("n_x", int)
    n_v = take("n_v", int)
    v_max = take("v_max", float)
    eps = take("eps", float)
    t_final = take("t_final", float)
    sigma = take("sigma", float)
    diagnostics_every = take("diagnostics_every", int, 0)
    q_list = take("q_list", lambda s: tuple(float(p) for p in s.split(",")), (4.0, 5.0))
    levels = take("levels", int)
    flags = {key: take(key, _parse_bool, False) for key in _BOOL_KEYS}

    ic_tag = None
    if "initial_condition" in entries:
        ic_tag, ic_line = entries["initial_condition"]
        if ic_tag not in _IC_TAGS:
            problems.append(
                f"line {ic_line}: initial_condition must be one of "
                f"{', '.join(_IC_TAGS)}; got {ic_tag!r}"
            )
            ic_tag = None

    for key in ("ic_rho", "ic_u", "ic_temp"):
        if key in entries and ic_tag not in (None, "uniform_maxwellian"):
            problems.append(
                f"line {entries[key][1]}: {key} requires "
                f"initial_condition = uniform_maxwellian"
            )
    if "ic_path" in entries and ic_tag not in (None, "tabulated"):
        problems.append(
            f"line {entries['ic_path'][1]}: ic_path requires "
            f"initial_condition = tabulated"
        )

    ic = None
    if ic_tag == "paper_test":
        ic = PerturbedMaxwellianIC()
    elif ic_tag == "uniform_maxwellian":
        try:
            ic = UniformMaxwellianIC(
                rho=take("ic_rho", float, 1.0),
                u=take("ic_u", float, 0.0),
                temp=take("ic_temp", float, 1.0),
            )
        except ValueError as err:
            problems.append(f"initial_condition: {err}")
    elif ic_tag == "tabulated":
        if "ic_path" not in entries:
            problems.append("initial_condition = tabulated requires ic_path")
        else:
            raw, lineno = entries["ic_path"]
            dump = Path(raw)
            if not dump.is_absolute():
                dump = path.parent / dump
            try:
                _, _, values = read_f_dump(dump)
                ic = TabulatedIC(values=values)
            except (OSError, ValueError) as err:
                problems.append(f"line {lineno}: ic_path: {err}")

    if "q_list" in entries and q_list is not None:
        bad = [q for q in q_list if not q > 3]
        if bad:
            problems.append(
                f"line {entries['q_list'][1]}: q_list entries must each be > 3 "
                f"(weighted-norm exponent requirement); got {bad}"
            )

    config = None
    if not problems:
        try:
            config = SolverConfig(
                n_x=n_x, n_v=n_v, v_max=v_max, eps=eps, t_final=t_final,
                sigma=sigma, initial_condition=ic,
                diagnostics_every=diagnostics_every, q_list=q_list, **flags,
            )
            if levels is not None:
                return StudyConfig(base=config, levels=levels)
        except (ValueError, TypeError) as err:
            problems.append(str(err))

    if problems:
        raise ConfigError(f"invalid config {path}:\n  " + "\n  ".join(problems))
    return config


def preset_path(name: str) -> Path:
    """Filesystem path of a shipped preset config, by bare name."""
    root = resources.files("vpbgk") / "presets"
    candidate = root / f"{name}.cfg"
    if not candidate.is_file():
        available = sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))
        raise FileNotFoundError(
            f"no preset named {name!r}; available: {', '.join(available)}"
        )
    return Path(str(candidate))


def resolve_config(name_or_path: str) -> Path:
    """Accept either a config file path or a shipped preset name."""
    p = Path(name_or_path)
    if p.is_file():
        return p
    return preset_path(name_or_path)


# ---------------------------------------------------------------------------
# report / snapshot emission


def _fmt(value: float) -> str:
    """Scientific notation with 5 significant digits."""
    return f"{value:.4e}"


def emit_report(report: ConvergenceReport, path) -> None:
    """Write a convergence report as a comma-separated table.

    Comment lines record the error convention and the dt policy; the header
    row is ``n_x,n_v,metric,error,order``.  Each row's order column relates
    its error to the next row's error, so the finest row leaves it empty.
    Output bytes are deterministic for a fixed report.
    """
    lines = [
        "# self_convergence: consecutive nested levels, fine sampled onto"
        " coarse nodes, compared at t_final",
        f"# dt_policy: {report.dt_policy}",
        f"# eps = {report.eps:g}; t_final = {report.t_final:g};"
        f" sigma = {report.sigma:g}; v_max = {report.v_max:g}",
        "n_x,n_v,metric,error,order",
    ]
    for row in report.rows:
        for metric in report.metrics:
            order = _fmt(row.orders[metric]) if metric in row.orders else ""
            lines.append(
                f"{row.n_x},{row.n_v},{metric},{_fmt(row.errors[metric])},{order}"
            )
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def emit_snapshot(state: SimulationState, path, *, f_path=None) -> None:
    """Write macro fields as ``x,rho,u,temp,e`` rows; optionally dump f.

    The x column is reconstructed from the row count (x_i = i/n_x).  Floats
    are written with 17 significant digits so values round-trip exactly.
    When ``f_path`` is given the full distribution is also dumped in the
    binary format of :func:`write_f_dump`.
    """
    macro = state.macro
    n_x = macro.rho.shape[0]
    x = np.arange(n_x) * (1.0 / n_x)
    e = np.asarray(state.e)
    lines = ["x,rho,u,temp,e"]
    for i in range(n_x):
        lines.append(
            f"{x[i]:.17e},{macro.rho[i]:.17e},{macro.u[i]:.17e},"
            f"{macro.temp[i]:.17e},{e[i]:.17e}"
        )
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")
    if f_path is not None:
        n_v = (state.f.data.shape[1] - 1) // 2
        write_f_dump(f_path, state.f.data, n_v)


def write_f_dump(path, data: np.ndarray, n_v: int) -> None:
    """Binary distribution dump.

    Layout: an 8-byte magic ``VPBGKF01``, then n_x and n_v as little-endian
    unsigned 8-byte integers (24 header bytes total), then the non-ghost
    values as little-endian 8-byte reals in row-major (i-major, j-minor)
    order.  Ghost rows are not stored; they are reconstructed as boundary
    copies on load, which matches any scheme-produced state.
    """
    data = np.ascontiguousarray(data, dtype="<f8")
    n_x, cols = data.shape
    if cols != 2 * n_v + 1:
        raise ValueError(f"data has {cols} velocity columns, expected {2 * n_v + 1}")
    with open(path, "wb") as fh:
        fh.write(F_DUMP_MAGIC)
        fh.write(struct.pack("<QQ", n_x, n_v))
        fh.write(data.tobytes(order="C"))


def read_f_dump(path) -> tuple[int, int, np.ndarray]:
    """Read a :func:`write_f_dump` file; returns (n_x, n_v, data)."""
    blob = Path(path).read_bytes()
    if len(blob) < 24 or blob[:8] != F_DUMP_MAGIC:
        raise ValueError(f"{path}: not a distribution dump (bad magic)")
    n_x, n_v = struct.unpack("<QQ", blob[8:24])
    cols = 2 * n_v + 1
    expected = 24 + 8 * n_x * cols
    if len(blob) != expected:
        raise ValueError(
            f"{path}: truncated or oversized dump ({len(blob)} bytes, "
            f"expected {expected})"
        )
    data = np.frombuffer(blob[24:], dtype="<f8").reshape(n_x, cols)
    return int(n_x), int(n_v), data.astype(np.float64)


def emit_diagnostics(log: DiagnosticsLog, path) -> None:
    """Write the cadence diagnostics records as a comma-separated table."""
    qs = sorted(log.records[0].weighted_norms) if log.records else []
    header = ["step", "t", "mass", "momentum", "kinetic_energy",
              "field_energy", "entropy", "min_f", "e_inf"]
    header += [f"f_Linf_q{q:g}" for q in qs]
    lines = [",".join(header)]
    for rec in log.records:
        row = [str(rec.step), f"{rec.t:.17e}", f"{rec.mass:.17e}",
               f"{rec.momentum:.17e}", f"{rec.kinetic_energy:.17e}",
               f"{rec.field_energy:.17e}", f"{rec.entropy:.17e}",
               f"{rec.min_f:.17e}", f"{rec.e_inf:.17e}"]
        row += [f"{rec.weighted_norms[q]:.17e}" for q in qs]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


# ---------------------------------------------------------------------------
# command-line entry point


def _config_echo(config: SolverConfig) -> dict:
    ic = config.initial_condition
    if isinstance(ic, TabulatedIC):
        ic_echo = {"tag": ic.tag, "shape": list(ic.values.shape)}
    elif isinstance(ic, UniformMaxwellianIC):
        ic_echo = {"tag": ic.tag, "rho": ic.rho, "u": ic.u, "temp": ic.temp}
    else:
        ic_echo = {"tag": ic.tag}
    return {
        "n_x": config.n_x, "n_v": config.n_v, "v_max": config.v_max,
        "eps": config.eps, "t_final": config.t_final, "sigma": config.sigma,
        "initial_condition": ic_echo,
        "diagnostics_every": config.diagnostics_every,
        "q_list": list(config.q_list),
        "fixed_dt": config.fixed_dt,
        "force_zero_field": config.force_zero_field,
        "transport_only": config.transport_only,
        "compensated_moments": config.compensated_moments,
    }


def _write_manifest(out_dir: Path, config_echo: dict, dt_policy: str,
                    wall_time: float, outputs: list[str]) -> None:
    manifest = {
        "config": config_echo,
        "version": __version__,
        "dt_policy": dt_policy,
        "wall_time_s": wall_time,
        "outputs": sorted(outputs),
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )


def _cmd_run(config: SolverConfig, out_dir: Path, snapshots: bool,
             plots: bool) -> None:
    state, log = run(config)
    outputs = ["manifest.json", "snapshot.csv", "diagnostics.csv"]
    emit_snapshot(state, out_dir / "snapshot.csv",
                  f_path=(out_dir / "f_final.bin") if snapshots else None)
    if snapshots:
        outputs.append("f_final.bin")
    emit_diagnostics(log, out_dir / "diagnostics.csv")
    if plots:
        from . import plots as _plots

        grid = config.grid()
        _plots.profile_figure(state, out_dir / "fig_profiles.png")
        _plots.history_figure(log, out_dir / "fig_history.png")
        outputs += ["fig_profiles.png", "fig_history.png"]
        flags = stability_report(state, config, grid)
    else:
        flags = stability_report(state, config, config.grid())
    _write_manifest(out_dir, _config_echo(config), log.dt_policy,
                    log.wall_time, outputs)
    print(f"run: {log.steps} steps to t = {config.t_final:g} "
          f"({log.dt_policy} dt) in {log.wall_time:.2f}s")
    for check in (flags.a1_mass, flags.a2_field, flags.positivity):
        status = "pass" if check.passed else "FAIL"
        print(f"  {check.name}: {status} (measured {check.measured:.6g},"
              f" bound {check.bound:.6g})")
    print(f"  outputs in {out_dir}")


def _cmd_study(config: SolverConfig, levels: int, out_dir: Path,
               snapshots: bool, plots: bool) -> None:
    t0 = time.perf_counter()
    report = convergence_study(config, levels, keep_states=snapshots)
    wall = time.perf_counter() - t0
    outputs = ["manifest.json", "report.csv"]
    emit_report(report, out_dir / "report.csv")
    if snapshots and report.states is not None:
        for summary, state in zip(report.levels, report.states):
            name = f"snapshot_{summary.n_x}x{summary.n_v}.csv"
            emit_snapshot(state, out_dir / name)
            outputs.append(name)
    if plots:
        from . import plots as _plots

        _plots.convergence_figure(report, out_dir / "fig_convergence.png")
        outputs.append("fig_convergence.png")
    echo = _config_echo(config)
    echo["levels"] = levels
    _write_manifest(out_dir, echo, report.dt_policy, wall, outputs)
    print(f"study: {levels} levels from ({config.n_x}, {config.n_v}) "
          f"in {wall:.2f}s")
    finest = report.rows[-1]
    for metric in report.metrics:
        order = report.rows[-2].orders[metric] if len(report.rows) > 1 else float("nan")
        print(f"  {metric}: coarsest-pair error {report.rows[0].errors[metric]:.4e},"
              f" finest-pair order {order:.3f}")
    print(f"  finest pair compared at ({finest.n_x * 2}, {finest.n_v * 2});"
          f" outputs in {out_dir}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vpbgk",
        description="Deterministic kinetic relaxation solver and convergence harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("run", "integrate one configuration to t_final"),
                            ("study", "run a nested-grid convergence study")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="config file path or shipped preset name")
        p.add_argument("--out-dir", default="out", help="output directory")
        p.add_argument("--snapshots", action="store_true",
                       help="also write large distribution snapshots")
        p.add_argument("--fixed-dt", action="store_true",
                       help="pin dt to the initial-field value")
        p.add_argument("--no-plots", action="store_true",
                       help="skip figure rendering")

    args = parser.parse_args(argv)
    try:
        parsed = parse_config(resolve_config(args.config))
    except (ConfigError, FileNotFoundError) as err:
        print(err, file=sys.stderr)
        return 2

    if isinstance(parsed, StudyConfig):
        config, levels = parsed.base, parsed.levels
    else:
        config, levels = parsed, None
    if args.fixed_dt:
        config = replace(config, fixed_dt=True)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    plots = not args.no_plots

    if args.command == "run":
        if levels is not None:
            print("note: config sets levels; `run` integrates the base "
                  "resolution only")
        _cmd_run(config, out_dir, args.snapshots, plots)
    else:
        if levels is None:
            levels = DEFAULT_STUDY_LEVELS
            print(f"note: config sets no levels; defaulting to {levels}")
        _cmd_study(config, levels, out_dir, args.snapshots, plots)
    return 0


if __name__ == "__main__":
    sys.exit(main())
