"""Command-line front end: TOML scenarios in, CSV out.

Every subcommand reads an optional ``--config`` file (TOML, one table per
module), lets flags override it, and writes CSV to stdout or to
``--out/<subcommand>.csv``.  Exit status: 0 success, 1 invariant violation,
2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import classifier, fields, firstorder, harmonic, operators, oracle, profiles

SUBCOMMANDS = ("classify", "fields", "spectrum", "firstorder", "verify-commutator",
               "oracle-compare", "trajectory")
EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 1, 2

# errors caused by inconsistent inputs rather than failed checks
_CONFIG_ERRORS = (profiles.InvalidCase, harmonic.DegenerateFrequencies,
                  firstorder.InvalidWavenumber, classifier.EmptyDomain)


class ConfigParse(ValueError):
    """Config text failed to parse or lacks a required field."""


class InvariantViolation(RuntimeError):
    """A computed result failed its acceptance check."""


def fmt(v) -> str:
    """17 significant digits, enough to round-trip a double."""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


# ---------------------------------------------------------------------------
# Config handling

def parse_config(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParse(f"config parse error: {exc}") from None


def scenario_text(name: str) -> str:
    """Text of a bundled scenario (see ``bundled_scenarios``) or of a file path."""
    path = Path(name)
    if path.suffix == ".toml" and path.exists():
        return path.read_text()
    res = resources.files("quasisep.scenarios").joinpath(f"{name}.toml")
    if not res.is_file():
        raise ConfigParse(f"unknown scenario {name!r}")
    return res.read_text()


def bundled_scenarios() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("quasisep.scenarios").iterdir()
                  if p.name.endswith(".toml"))


def _section(cfg: dict, name: str) -> dict:
    sec = cfg.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigParse(f"[{name}] must be a table")
    return sec


def _get(sec: dict, key: str, where: str, flag=None, default=None, cast=float, required=True):
    if flag is not None:
        return cast(flag)
    if key in sec:
        try:
            return cast(sec[key])
        except (TypeError, ValueError):
            raise ConfigParse(f"field '{key}' in [{where}] has invalid value {sec[key]!r}") from None
    if default is not None or not required:
        return default
    raise ConfigParse(f"missing field '{key}' in [{where}]")


def _hbar(cfg: dict, args) -> float:
    return float(args.hbar) if args.hbar is not None else float(cfg.get("hbar", 1.0))


def _seed(cfg: dict, args) -> int:
    return int(args.seed) if args.seed is not None else int(cfg.get("seed", 0))


def harmonic_setup(cfg: dict, args) -> harmonic.HarmonicSetup:
    sec = _section(cfg, "harmonic")
    bfield = getattr(args, "bfield", None)
    if bfield is None and "Omega0" not in sec:
        bfield = sec.get("bfield")
    return harmonic.HarmonicSetup(
        _get(sec, "omega1", "harmonic", getattr(args, "omega1", None)),
        _get(sec, "omega2", "harmonic", getattr(args, "omega2", None)),
        _get(sec, "Omega0", "harmonic", bfield),
        _hbar(cfg, args))


def theorem_system(cfg: dict):
    """(params, f, g, case, constants) from [params], [profile.f], [profile.g], [classify]."""
    sec = _section(cfg, "params")
    known = ("alpha", "beta", "gamma", "delta", "xi", "mu", "sigma1", "sigma2")
    extra = set(sec) - set(known)
    if extra:
        raise ConfigParse(f"unknown field(s) {sorted(extra)} in [params]")
    params = profiles.CubicParams(**{k: float(v) for k, v in sec.items()})
    prof = _section(cfg, "profile")
    try:
        fp = profiles.profile_from_config(_section(prof, "f"), params, "X")
        gp = profiles.profile_from_config(_section(prof, "g"), params, "Y")
    except KeyError as exc:
        raise ConfigParse(f"missing field '{exc.args[0]}' in a [profile.f]/[profile.g] table") from None
    params = replace(params, sigma1=fp.sigma, sigma2=gp.sigma)
    case = classifier.classify(params, fp, gp)
    csec = _section(cfg, "classify")
    sc = None
    if case.separable:
        sc = classifier.separation_constants(case, params, fp, gp, k=csec.get("k"),
                                             eps1=float(csec.get("eps1", 1.0)),
                                             eps2=csec.get("eps2"))
    return params, fp, gp, case, sc


def _system(cfg: dict, args, name: str):
    """Field set, X action and classical integral for the configured system."""
    sec = _section(cfg, name)
    kind = sec.get("system", "harmonic")
    hb = _hbar(cfg, args)
    if kind == "harmonic":
        setup = harmonic_setup(cfg, args)
        params, fp, gp = setup.to_cubic()
        fs = setup.fieldset()
        idata = fields.build_fields(params, fp, gp)[2]
        return fs, _cartesian_applier(params, fp, gp, fs, idata), operators.cartesian_classical_integral(idata)
    if kind == "theorem":
        params, fp, gp, case, sc = theorem_system(cfg)
        if not case.separable:
            raise InvariantViolation(f"configuration is not quasiseparable: {case.note}")
        fs, idata = fields.theorem1_fieldset(case, params, fp, gp, sc, hb)
        return fs, _cartesian_applier(params, fp, gp, fs, idata), operators.cartesian_classical_integral(idata)
    if kind == "landau":
        omega = _get(sec, "omega", name, default=1.0)
        k = _get(sec, "k", name, default=1.0)
        cfo = firstorder.hermite_system(omega, k, hb)
        if sec.get("potential", "V0") == "W0":
            cfo = replace(cfo, w=lambda x: 0.0 * np.asarray(x, float))
        fs = cfo.fieldset()
        coeffs, m_fn = cfo.integral_coeffs()
        def applier(psi, boundary_tol=operators.BOUNDARY_TOL):
            return operators.apply_X_first_order(fs, m_fn, coeffs, psi, boundary_tol)
        return fs, applier, operators.first_order_classical_integral(coeffs, m_fn)
    raise ConfigParse(f"field 'system' in [{name}] must be harmonic, theorem or landau")


def _cartesian_applier(params, fp, gp, fs, idata):
    def applier(psi, boundary_tol=operators.BOUNDARY_TOL):
        return operators.apply_X_cartesian(params, fp, gp, fs, psi, boundary_tol, idata)
    return applier


# ---------------------------------------------------------------------------
# Subcommands: each returns (header, rows, status)

def cmd_classify(cfg, args, out):
    params, fp, gp, case, sc = theorem_system(cfg)
    rows = [("case", case.tag), ("table_row_f", case.table_row_f or ""),
            ("table_row_g", case.table_row_g or ""), ("phi_kind", case.phi_kind or ""),
            ("note", case.note)]
    status = EXIT_OK
    if sc is not None:
        rows += [("k", sc.k), ("c1", sc.c1), ("c2", sc.c2), ("eps1", sc.eps1), ("eps2", sc.eps2),
                 ("N1", sc.n1_const), ("N2", sc.n2_const)]
    if case.tag == "Case4_Tables":
        window = _section(cfg, "classify").get("window", [[-10.0, 10.0], [-10.0, 10.0]])
        xs, ys = classifier.admissible_domain(fp, gp, sc, window=tuple(map(tuple, window)))
        x = classifier.admissible_samples(xs, 24, margin=0.2)
        y = classifier.admissible_samples(ys, 24, margin=0.2)
        _, _, spread = classifier.compute_N1_N2(fp, gp, sc, x, y)
        tmax = classifier.separability_residual(case, params, fp, gp, sc, x, y, _hbar(cfg, args))
        rows += [("N_spread", spread), ("max_T_xy", tmax)]
        if spread > classifier.CONSTANCY_RTOL:
            status = EXIT_INVARIANT
    elif case.separable:
        x, y = _grid(cfg, "grid", args, default_n=24, default_half=2.0)
        try:
            rows.append(("max_residual", classifier.separability_residual(case, params, fp, gp, sc, x, y)))
        except classifier.DerivativeZero:
            rows.append(("max_residual", "nan"))
    return ("key", "value"), rows, status


def _grid(cfg, name, args, default_n=64, default_half=4.0):
    sec = _section(cfg, name)
    n = int(getattr(args, "n", None) or sec.get("n", default_n))
    box = sec.get("box")
    if box is None:
        half = float(sec.get("half_width", default_half))
        box = [[-half, half], [-half, half]]
    x = np.linspace(float(box[0][0]), float(box[0][1]), n)
    y = np.linspace(float(box[1][0]), float(box[1][1]), n)
    return x, y


def cmd_fields(cfg, args, out):
    if "params" in cfg:
        params, fp, gp, case, sc = theorem_system(cfg)
        fs, _ = fields.theorem1_fieldset(case, params, fp, gp, sc, _hbar(cfg, args))
    else:
        fs = harmonic_setup(cfg, args).fieldset()
    x, y = _grid(cfg, "grid", args)
    data = fs.sample(x, y)
    keys = ("x", "y", "omega", "w", "a", "b", "v")
    flat = [np.broadcast_to(data[k], data["x"].shape).ravel() for k in keys]
    return keys, list(zip(*flat)), EXIT_OK


def cmd_spectrum(cfg, args, out):
    setup = harmonic_setup(cfg, args)
    sec = _section(cfg, "harmonic")
    nmax = int(args.nmax if args.nmax is not None else sec.get("nmax", 3))
    lv = harmonic.levels(setup, nmax)
    rows = [(l.n, l.index, l.energy, l.lam) for l in lv]
    if args.coefficients or sec.get("coefficients", False):
        coef = [(l.n, l.index, j, a.real, a.imag) for l in lv for j, a in enumerate(l.coefficients)]
        _emit(("n", "index", "n1", "re", "im"), coef, out, "coefficients")
    grid_n = args.grid if args.grid is not None else sec.get("grid")
    if grid_n:
        if out is None:
            raise ConfigParse("--grid needs --out for the wavefunction files")
        half = float(sec.get("grid_half_width", 8.0 / min(setup.tau1, setup.tau2)))
        xs = np.linspace(-half, half, int(grid_n))
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        for l in lv:
            psi = harmonic.wavefunction(setup, l, X, Y)
            _emit(("x", "y", "re", "im"), zip(X.ravel(), Y.ravel(), psi.real.ravel(), psi.imag.ravel()),
                  out, f"psi_n{l.n}_{l.index}")
    return ("n", "index", "E", "lambda"), rows, EXIT_OK


def cmd_firstorder(cfg, args, out):
    sec = _section(cfg, "firstorder")
    hb = _hbar(cfg, args)
    case = args.case or sec.get("case", "cartesian")
    count = int(args.count or sec.get("count", 6))
    grid_n = int(sec.get("grid_n", 2000))
    tol = float(sec.get("tolerance", 1e-6))
    exact = None
    if case == "cartesian":
        omega = _get(sec, "omega", "firstorder", args.omega, default=1.0)
        k = _get(sec, "k", "firstorder", args.k, default=1.0)
        cfo = firstorder.hermite_system(omega, k, hb)
        domain = tuple(sec.get("domain", (-8.0, 8.0)))
        E = firstorder.cartesian_spectrum(cfo, count, domain, grid_n)
        exact = [firstorder.cartesian_exact_hermite(omega, k, n, hb)[0] for n in range(count)]
    elif case == "polar":
        b = _get(sec, "b", "firstorder", args.b, default=0.0)
        w = _get(sec, "w", "firstorder", args.w, default=1.0)
        M = int(_get(sec, "M", "firstorder", args.M, default=0, cast=int))
        pfo = firstorder.PolarFirstOrder(lambda r: b * r * r, lambda r: 2 * b * r,
                                         lambda r: 0.5 * w * w * r * r, M, hb)
        r_max = float(sec.get("r_max", 10.0))
        E = firstorder.radial_spectrum(pfo, count, (0.0, r_max), grid_n)
        om = np.hypot(b, w)
        exact = [hb * om * (2 * n + abs(M) + 1) - hb * M * b for n in range(count)]
    else:
        raise ConfigParse("field 'case' in [firstorder] must be cartesian or polar")
    dev = [abs(e - x) for e, x in zip(E, exact)]
    rows = [(i, e, x, d) for i, (e, x, d) in enumerate(zip(E, exact, dev))]
    print(f"max_deviation={fmt(max(dev))}", file=sys.stderr)
    status = EXIT_OK if max(dev) <= tol else EXIT_INVARIANT
    return ("index", "E", "E_exact", "abs_dev"), rows, status


def cmd_verify_commutator(cfg, args, out):
    sec = _section(cfg, "commutator")
    fs, applier, _ = _system(cfg, args, "commutator")
    sizes = args.sizes or sec.get("sizes", [64, 128, 256])
    count = int(sec.get("count", 5))
    order = int(sec.get("order", 4))
    box = sec.get("box", [[-4.0, 4.0], [-4.0, 4.0]])
    tol = sec.get("tolerance")
    rng_seed = _seed(cfg, args)
    rows = []
    for n in map(int, sizes):
        x = np.linspace(float(box[0][0]), float(box[0][1]), n)
        y = np.linspace(float(box[1][0]), float(box[1][1]), n)
        tests = operators.gaussian_tests(x, y, np.random.default_rng(rng_seed), count, order=order)
        rows.append((n, x[1] - x[0], operators.commutator_residual(fs, applier, tests)))
    status = EXIT_OK if tol is None or rows[-1][2] <= float(tol) else EXIT_INVARIANT
    return ("n", "h", "residual"), rows, status


def cmd_oracle_compare(cfg, args, out):
    setup = harmonic_setup(cfg, args)
    sec = _section(cfg, "oracle")
    nmax = int(sec.get("nmax", _section(cfg, "harmonic").get("nmax", 3)))
    n = int(args.n or sec.get("n", 96))
    count = int(sec.get("count", 20))
    tol = float(sec.get("tolerance", 5e-4))
    exact = np.sort(np.concatenate([harmonic.spectrum(setup, j) for j in range(nmax + 1)]))
    half = float(sec.get("half_width", oracle.default_half_width(min(setup.tau1, setup.tau2))))
    dh = oracle.DiscreteHamiltonian.build(setup.fieldset(), n, half)
    numeric = oracle.lowest_eigenvalues(dh, count)
    report = oracle.compare_spectra(exact, numeric, tol)
    print(f"grid={n} matched={len(report.pairs)} unmatched_exact={len(report.unmatched_exact)} "
          f"max_rel_deviation={fmt(report.max_rel_deviation)}", file=sys.stderr)
    rows = [(e, m, a, r) for e, m, a, r in report.rows()]
    rows += [(e, "", "", "") for e in report.unmatched_exact]
    return ("exact", "numeric", "abs_dev", "rel_dev"), rows, EXIT_OK if report.ok else EXIT_INVARIANT


def cmd_trajectory(cfg, args, out):
    sec = _section(cfg, "trajectory")
    fs, _, integral = _system(cfg, args, "trajectory")
    s0 = operators.ClassicalState(*(float(sec.get(k, d)) for k, d in
                                    (("x", 1.0), ("y", 0.0), ("vx", 0.0), ("vy", 1.0))))
    dt = _get(sec, "dt", "trajectory", args.dt, default=1e-2)
    T = _get(sec, "T", "trajectory", args.T, default=10.0)
    stride = int(sec.get("stride", 1))
    path = operators.classical_trajectory(fs.omega_field, fs.w_eff, s0, dt, T)
    rows = [(s.t, s.x, s.y, s.vx, s.vy, operators.energy(s, fs.w_eff), integral(s))
            for s in path[::stride]]
    return ("t", "x", "y", "vx", "vy", "energy", "integral"), rows, EXIT_OK


COMMANDS = {
    "classify": cmd_classify, "fields": cmd_fields, "spectrum": cmd_spectrum,
    "firstorder": cmd_firstorder, "verify-commutator": cmd_verify_commutator,
    "oracle-compare": cmd_oracle_compare, "trajectory": cmd_trajectory,
}


def _emit(header, rows, out, name):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    if out is None:
        sys.stdout.write(buf.getvalue())
    else:
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.csv").write_text(buf.getvalue())


# ---------------------------------------------------------------------------
# Argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file")
    common.add_argument("--out", help="directory for CSV outputs (default: stdout)")
    common.add_argument("--seed", type=int, help="seed for randomized test functions")
    common.add_argument("--hbar", type=float, help="Planck constant (default 1)")

    p = argparse.ArgumentParser(prog="quasisep", parents=[common],
                                description="Quasiseparable magnetic Hamiltonians: build, solve, verify.")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[common], help="classify a profile pair")
    s = sub.add_parser("fields", parents=[common], help="sample Omega, W, A, B, V on a grid")
    s.add_argument("--n", type=int, help="grid nodes per axis")
    s = sub.add_parser("spectrum", parents=[common], help="exact levels of the constant-field oscillator")
    s.add_argument("--omega1", type=float)
    s.add_argument("--omega2", type=float)
    s.add_argument("--bfield", type=float)
    s.add_argument("--nmax", type=int)
    s.add_argument("--coefficients", action="store_true", help="also emit block eigenvectors")
    s.add_argument("--grid", type=int, help="also emit each wavefunction on an N x N lattice")
    s = sub.add_parser("firstorder", parents=[common], help="first-order integrable systems")
    s.add_argument("--case", choices=("cartesian", "polar"))
    s.add_argument("--omega", type=float, help="cartesian: m = omega^2 x^2")
    s.add_argument("--k", type=float, help="cartesian: wavenumber")
    s.add_argument("--b", type=float, help="polar: m = b r^2")
    s.add_argument("--w", type=float, help="polar: W = w^2 r^2 / 2")
    s.add_argument("--M", type=int, help="polar: angular quantum number")
    s.add_argument("--count", type=int)
    s = sub.add_parser("verify-commutator", parents=[common], help="discrete [X, H] residuals")
    s.add_argument("--sizes", type=int, nargs="+")
    s.add_argument("--omega1", type=float)
    s.add_argument("--omega2", type=float)
    s.add_argument("--bfield", type=float)
    s = sub.add_parser("oracle-compare", parents=[common], help="exact levels against the FD oracle")
    s.add_argument("--n", type=int, help="oracle grid nodes per axis")
    s.add_argument("--omega1", type=float)
    s.add_argument("--omega2", type=float)
    s.add_argument("--bfield", type=float)
    s = sub.add_parser("trajectory", parents=[common], help="classical RK4 path")
    s.add_argument("--dt", type=float)
    s.add_argument("--T", type=float)
    s.add_argument("--omega1", type=float)
    s.add_argument("--omega2", type=float)
    s.add_argument("--bfield", type=float)
    s = sub.add_parser("run", parents=[common], help="run a scenario (bundled name or TOML path)")
    s.add_argument("--scenario", help="bundled scenario name or path; default: --config")
    s.add_argument("--list", action="store_true", help="list bundled scenarios")
    return p


_DEFAULTS = {"omega1": None, "omega2": None, "bfield": None, "nmax": None, "coefficients": False,
             "grid": None, "case": None, "omega": None, "k": None, "b": None, "w": None, "M": None,
             "count": None, "sizes": None, "n": None, "dt": None, "T": None}


def run_scenario(config_text: str, args=None, out: Path | None = None) -> int:
    """Run the module named by the config's ``module`` key; returns the exit status."""
    cfg = parse_config(config_text)
    module = cfg.get("module")
    if module not in COMMANDS:
        raise ConfigParse(f"field 'module' must be one of {', '.join(SUBCOMMANDS)}")
    args = args or argparse.Namespace(hbar=None, seed=None)
    ns = argparse.Namespace(**{**_DEFAULTS, **vars(args)})
    header, rows, status = COMMANDS[module](cfg, ns, out)
    _emit(header, rows, out, str(cfg.get("name", module)))
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out) if args.out else None
    try:
        if args.command == "run":
            if args.list:
                print("\n".join(bundled_scenarios()))
                return EXIT_OK
            if args.scenario:
                text = scenario_text(args.scenario)
            elif args.config:
                text = Path(args.config).read_text()
            else:
                raise ConfigParse("run needs --scenario or --config")
            return run_scenario(text, args, out)
        cfg = parse_config(Path(args.config).read_text()) if args.config else {}
        ns = argparse.Namespace(**{**_DEFAULTS, **vars(args)})
        header, rows, status = COMMANDS[args.command](cfg, ns, out)
        _emit(header, rows, out, args.command)
        return status
    except (ConfigParse, OSError, *_CONFIG_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvariantViolation, oracle.NoConvergence, oracle.NotHermitian, firstorder.NotConfining,
            firstorder.NotConverged, harmonic.RankDeficiency, harmonic.ComplexSpectrum,
            classifier.NotQuasiseparable, classifier.DomainViolation,
            operators.BoundaryContamination) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
