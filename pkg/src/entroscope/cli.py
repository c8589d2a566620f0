"""Command-line front end: config merge, spectrum cache, experiment
dispatch, and CSV/JSON emission with a checksummed manifest."""
import argparse
import hashlib
import json
import math
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np
import scipy

from . import __version__
from .basis import enumerate_sector
from .config import (
    CACHE_POLICIES,
    EXPERIMENTS,
    FORMATS,
    RunConfig,
    _parse_int_list,
    parse_config,
)
from .errors import ConfigError, EntroscopeError, NumericsError, StorageError
from .experiments import (
    degeneracy_census,
    fit_entropy_vs_lndos,
    run_eigenket_scan,
    run_shell_average,
    run_volume_law,
)
from .hamiltonian import ModelParams, build_hamiltonian
from .properties import format_tap, run_property_suite
from .spectral import (
    Spectrum,
    diagonalize_model,
    load_spectrum,
    partition_shells,
    save_spectrum,
    spectrum_cache_path,
)
from .states import BipartitionSpec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3
EXIT_IO = 4

CACHE_DIR_ENV = "ENTROSCOPE_CACHE_DIR"
LOCK_NAME = ".entroscope.lock"
LN2 = math.log(2.0)


@dataclass(frozen=True)
class OutFile:
    """One rendered artifact, ready to write."""

    name: str
    content: str


def _fmt_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _json_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, str):
        return value
    v = float(value)
    return None if math.isnan(v) else v


def render_table(name: str, header: list[str], rows: list[tuple], fmt: str) -> OutFile:
    """Render rows as CSV (17-significant-digit floats) or as wrapped JSON."""
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(_fmt_cell(v) for v in row) for row in rows]
        return OutFile(name=f"{name}.csv", content="\n".join(lines) + "\n")
    payload = {
        "columns": header,
        "rows": [[_json_cell(v) for v in row] for row in rows],
    }
    return OutFile(name=f"{name}.json", content=json.dumps(payload, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Spectrum acquisition with cache.
# ---------------------------------------------------------------------------


def resolve_cache_dir(cfg: RunConfig) -> str:
    env = os.environ.get(CACHE_DIR_ENV)
    return env if env else os.path.join(cfg.out_dir, "cache")


def obtain_spectrum(
    cfg: RunConfig, delta2: float, n_up: int, cache_dir: str
) -> tuple[Spectrum, str]:
    """Load from cache when allowed and keyed identically, else build.

    A cache file that fails to load (corrupt, wrong params) is rebuilt and
    overwritten rather than trusted.
    """
    params = ModelParams(n_sites=cfg.n_sites, delta2=delta2)
    path = spectrum_cache_path(cache_dir, params, n_up)
    if cfg.cache == "use" and os.path.exists(path):
        try:
            return load_spectrum(path, expect_params=params), "cache"
        except StorageError:
            pass
    basis = enumerate_sector(cfg.n_sites, n_up)
    spec = diagonalize_model(build_hamiltonian(basis, params), params)
    if cfg.cache != "off":
        os.makedirs(cache_dir, exist_ok=True)
        save_spectrum(spec, path)
    return spec, "built"


# ---------------------------------------------------------------------------
# Experiment handlers.  Each returns (files, manifest_extras).
# ---------------------------------------------------------------------------


def _unit(cfg: RunConfig) -> float:
    return LN2 if cfg.bits else 1.0


def _cmd_eigenket_scan(cfg: RunConfig, cache_dir: str):
    files, extras = [], {}
    u = _unit(cfg)
    for d2 in cfg.delta2_list:
        spec, source = obtain_spectrum(cfg, d2, cfg.n_up, cache_dir)
        dos = partition_shells(spec, cfg.n_bins)
        scan, dos = run_eigenket_scan(
            spec, BipartitionSpec(cfg.n_sites, cfg.l1), dos
        )
        rows = [
            (n, scan.energies[n], scan.s_vn[n] / u,
             bool(scan.in_multiplet[n]), int(scan.shell_index[n]))
            for n in range(scan.count)
        ]
        files.append(render_table(
            f"eigenket_scan_d2={d2:g}",
            ["n", "energy", "s_vn", "in_multiplet", "shell_index"],
            rows, cfg.format,
        ))
        dos_rows = [
            (j, s.lower, s.upper, s.count, dos.dos[j], dos.ln_dos[j])
            for j, s in enumerate(dos.shells)
        ]
        files.append(render_table(
            f"dos_d2={d2:g}",
            ["shell_index", "lower", "upper", "count", "dos", "ln_dos"],
            dos_rows, cfg.format,
        ))
        extras[f"d2={d2:g}"] = {"spectrum": source, "records": scan.count}
    return files, extras


def _shell_table(cfg: RunConfig, d2: float, cache_dir: str):
    spec, source = obtain_spectrum(cfg, d2, cfg.n_up, cache_dir)
    dos = partition_shells(spec, cfg.n_bins)
    table = run_shell_average(
        spec, BipartitionSpec(cfg.n_sites, cfg.l1), dos,
        min_count=cfg.min_shell_count,
    )
    return table, source


def _cmd_shell_average(cfg: RunConfig, cache_dir: str):
    files, extras = [], {}
    u = _unit(cfg)
    for d2 in cfg.delta2_list:
        t, source = _shell_table(cfg, d2, cache_dir)
        gamma = t.gamma_predicted
        slack = t.concavity_slack
        rows = [
            (int(t.shell_index[r]), t.lower[r], t.upper[r], t.midpoint[r],
             int(t.d_e[r]), t.ln_dos[r], t.mean_svn[r] / u,
             t.svn_avg_rdm[r] / u, t.std_svn[r] / u, gamma[r], slack[r] / u)
            for r in range(t.n_rows)
        ]
        files.append(render_table(
            f"shell_average_d2={d2:g}",
            ["shell_index", "lower", "upper", "midpoint", "d_E", "ln_dos",
             "mean_svn", "svn_avg_rdm", "std_svn", "gamma_predicted",
             "concavity_slack"],
            rows, cfg.format,
        ))
        extras[f"d2={d2:g}"] = {"spectrum": source, "rows": t.n_rows}
    return files, extras


def _cmd_volume_law(cfg: RunConfig, cache_dir: str):
    files, extras = [], {}
    u = _unit(cfg)
    l1_range = cfg.volume_law_range()
    for d2 in cfg.delta2_list:
        spec, source = obtain_spectrum(cfg, d2, cfg.n_up, cache_dir)
        dos = partition_shells(spec, cfg.n_bins)
        vt = run_volume_law(spec, dos, l1_range)
        rows = [
            (int(vt.l1[i]), vt.mean_svn[i] / u, vt.shell_lo, vt.shell_hi, vt.d_e)
            for i in range(len(vt.l1))
        ]
        files.append(render_table(
            f"volume_law_d2={d2:g}",
            ["l1", "mean_svn", "shell_lo", "shell_hi", "d_E"],
            rows, cfg.format,
        ))
        extras[f"d2={d2:g}"] = {"spectrum": source, "mid_shell_d_E": vt.d_e}
    return files, extras


def _cmd_gamma_fit(cfg: RunConfig, cache_dir: str):
    files, extras = [], {}
    for d2 in cfg.delta2_list:
        t, source = _shell_table(cfg, d2, cache_dir)
        rows = []
        for side in ("left", "right"):
            try:
                fit = fit_entropy_vs_lndos(t, side)
            except ValueError as exc:
                raise NumericsError(f"d2={d2:g}, {side} side: {exc}") from exc
            rows.append((side, fit.slope, fit.intercept, fit.r_squared,
                         fit.n_rows, fit.gamma_predicted_mean))
        files.append(render_table(
            f"gamma_fit_d2={d2:g}",
            ["side", "slope", "intercept", "r_squared", "n_rows",
             "gamma_predicted_mean"],
            rows, cfg.format,
        ))
        extras[f"d2={d2:g}"] = {"spectrum": source}
    return files, extras


def _cmd_degeneracy_census(cfg: RunConfig, cache_dir: str):
    """Diagonalize every Sz sector (eigenvalues only) and census the merge."""
    files, extras = [], {}
    for d2 in cfg.delta2_list:
        params = ModelParams(n_sites=cfg.n_sites, delta2=d2)
        merged = []
        for n_up in range(cfg.n_sites + 1):
            path = spectrum_cache_path(cache_dir, params, n_up)
            evals = None
            if cfg.cache == "use" and os.path.exists(path):
                try:
                    evals = load_spectrum(path, expect_params=params).eigenvalues
                except StorageError:
                    evals = None
            if evals is None:
                basis = enumerate_sector(cfg.n_sites, n_up)
                h = build_hamiltonian(basis, params).to_dense()
                evals = np.linalg.eigvalsh(h)
            merged.append(evals)
        census = degeneracy_census(np.concatenate(merged))
        rows = sorted(census.histogram.items())
        files.append(render_table(
            f"degeneracy_census_d2={d2:g}", ["size", "count"], rows, cfg.format,
        ))
        extras[f"d2={d2:g}"] = {
            "n_levels": census.n_levels,
            "fraction_degenerate": census.fraction_degenerate,
        }
    return files, extras


def _cmd_property_suite(cfg: RunConfig, cache_dir: str):
    results = run_property_suite(seed=cfg.seed)
    files = [OutFile(name="property_suite.tap", content=format_tap(results))]
    extras = {"all_ok": all(r.ok for r in results),
              "checks": {r.name: r.ok for r in results}}
    if not extras["all_ok"]:
        failed = [r.name for r in results if not r.ok]
        extras["failed"] = failed
    return files, extras


_HANDLERS = {
    "eigenket-scan": _cmd_eigenket_scan,
    "shell-average": _cmd_shell_average,
    "volume-law": _cmd_volume_law,
    "gamma-fit": _cmd_gamma_fit,
    "degeneracy-census": _cmd_degeneracy_census,
    "property-suite": _cmd_property_suite,
}


# ---------------------------------------------------------------------------
# Orchestration.
# ---------------------------------------------------------------------------


def _acquire_lock(out_dir: str) -> str:
    path = os.path.join(out_dir, LOCK_NAME)
    try:
        fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise StorageError(
            f"output directory {out_dir} is locked by another run "
            f"(remove {LOCK_NAME} if stale)"
        ) from None
    with os.fdopen(fd, "w") as fh:
        fh.write(str(os.getpid()))
    return path


def run(cfg: RunConfig) -> int:
    """Execute one experiment; returns the exit code."""
    t0 = time.perf_counter()
    try:
        os.makedirs(cfg.out_dir, exist_ok=True)
    except OSError as exc:
        raise StorageError(f"cannot create output directory: {exc}") from exc
    lock = _acquire_lock(cfg.out_dir)
    try:
        cache_dir = resolve_cache_dir(cfg)
        files, extras = _HANDLERS[cfg.experiment](cfg, cache_dir)
        checksums = {}
        for f in files:
            target = os.path.join(cfg.out_dir, f.name)
            data = f.content.encode("utf-8")
            try:
                with open(target, "wb") as fh:
                    fh.write(data)
            except OSError as exc:
                raise StorageError(f"cannot write {target}: {exc}") from exc
            checksums[f.name] = hashlib.sha256(data).hexdigest()
        manifest = {
            "experiment": cfg.experiment,
            "config": asdict(cfg),
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "entroscope": __version__,
            },
            "cache_dir": cache_dir if cfg.cache != "off" else None,
            "files": checksums,
            "details": extras,
            "wall_time_s": round(time.perf_counter() - t0, 3),
        }
        manifest_path = os.path.join(cfg.out_dir, "manifest.json")
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    finally:
        try:
            os.unlink(lock)
        except OSError:
            pass
    if cfg.experiment == "property-suite" and not extras["all_ok"]:
        raise NumericsError(f"property checks failed: {extras['failed']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="entroscope",
        description="Exact-diagonalization entropy experiments on spin-1/2 chains.",
    )
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", metavar="FILE", help="flat key = value config file")
    p.add_argument("--n-sites", type=int, dest="n_sites", metavar="N")
    p.add_argument("--n-up", type=int, dest="n_up", metavar="K")
    p.add_argument(
        "--delta2", type=float, action="append", dest="delta2_list", metavar="X",
        help="next-nearest-neighbor coupling; repeat for several values",
    )
    p.add_argument("--l1", type=int, metavar="L", help="subsystem size (sites 1..L)")
    p.add_argument(
        "--l1-range", dest="l1_range", metavar="A,B,...",
        help="comma-separated l1 sweep (volume-law)",
    )
    p.add_argument("--bins", type=int, dest="n_bins", metavar="B")
    p.add_argument(
        "--min-count", type=int, dest="min_shell_count", metavar="M",
        help="smallest shell population kept in shell tables",
    )
    p.add_argument("--seed", type=int, metavar="S")
    p.add_argument("--out", dest="out_dir", metavar="DIR")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--cache", choices=CACHE_POLICIES)
    p.add_argument(
        "--bits", action="store_true", default=None,
        help="emit entropy columns in bits (divide by ln 2)",
    )
    return p


def _error_record(exc: Exception, code: int) -> str:
    return json.dumps(
        {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    raw = vars(args)
    overrides = {
        k: v for k, v in raw.items() if v is not None and k != "config"
    }
    try:
        if "l1_range" in overrides:
            overrides["l1_range"] = _parse_int_list("l1_range", overrides["l1_range"])
        cfg = parse_config(args.config, overrides)
        return run(cfg)
    except ConfigError as exc:
        print(_error_record(exc, EXIT_CONFIG), file=sys.stderr)
        return EXIT_CONFIG
    except (NumericsError, ValueError) as exc:
        print(_error_record(exc, EXIT_NUMERICS), file=sys.stderr)
        return EXIT_NUMERICS
    except (StorageError, OSError) as exc:
        print(_error_record(exc, EXIT_IO), file=sys.stderr)
        return EXIT_IO
    except EntroscopeError as exc:
        print(_error_record(exc, EXIT_NUMERICS), file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
