"""Command-line front end.

Every run writes CSV tables plus ``manifest.ini`` into ``--out``. The
manifest is a complete config file, so ``--config out/manifest.ini``
reproduces the run byte for byte.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import fock
from . import gaussian as ge
from . import montecarlo as mc
from . import plate as pl
from . import schmidt
from .config import Config, ConfigError, load_config, schema_help, validate
from .stokes import WitnessUndefined, nrf, stokes_moments_gaussian, witness
from .tables import write_table

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
ORACLE_TOL = 1e-8


class NumericFailure(RuntimeError):
    pass


def experiment_config(cfg: Config, **overrides) -> mc.ExperimentConfig:
    d1 = cfg["aperture.d1_mm"]
    if d1 is None:
        ratio = 1.0
    else:
        ratio = mc.aperture_ratio(d1 * 1e-3, cfg["aperture.d2_mm"] * 1e-3,
                                  cfg["aperture.lambda_a_nm"] * 1e-9, cfg["aperture.lambda_b_nm"] * 1e-9)
    kw = dict(
        gamma=cfg["state.gamma"], n_pairs=cfg["state.n_pairs"], pulses=cfg["experiment.pulses"],
        eta=cfg["detection.eta"], pump_jitter=cfg["experiment.pump_jitter"],
        electronic_noise_electrons=cfg["detection.electronic_noise_electrons"],
        detector_gain=cfg["detection.detector_gain"], seed=cfg["experiment.seed"],
        aperture_ratio=ratio, state=cfg["state.kind"],
    )
    kw.update(overrides)
    try:
        return mc.ExperimentConfig(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


class Run:
    """Output directory bookkeeping shared by all subcommands."""

    def __init__(self, name: str, cfg: Config, out: Path):
        self.name, self.cfg, self.out = name, cfg, out
        self.files: list[str] = []
        self.pending = []

    def table(self, filename: str, columns, rows, **extra):
        self.files.append(filename)
        self.pending.append((filename, columns, [list(r) for r in rows], extra))

    def manifest_header(self) -> dict:
        head = {"subcommand": self.name, "version": __version__, "seed": self.cfg["experiment.seed"],
                "outputs": " ".join(self.files + ["manifest.ini"])}
        head.update({f"config.{k}": v for k, v in self.cfg.items()})
        return head

    def flush(self) -> None:
        self.out.mkdir(parents=True, exist_ok=True)
        base = self.manifest_header()
        for filename, columns, rows, extra in self.pending:
            write_table(self.out / filename, {**base, **extra}, columns, rows)
        lines = [f"# {k}: {base[k]}" for k in ("subcommand", "version", "seed", "outputs")]
        (self.out / "manifest.ini").write_text("\n".join(lines) + "\n" + self.cfg.to_ini())


# --- subcommands ------------------------------------------------------------

def run_witness(run: Run, threads: int) -> None:
    config = experiment_config(run.cfg)
    analytic_moments = mc.analytic_stokes_moments(config)
    analytic = witness(analytic_moments)
    sampled_moments = mc.estimate_stokes_for(config, mc.simulate_stokes_run(config, threads))
    sampled = witness(sampled_moments)
    rows = [("mean_S0", analytic_moments.mean_S0, sampled_moments.mean_S0, sampled_moments.se_mean_S0)]
    for i in (1, 2, 3):
        rows.append((f"var_S{i}", analytic_moments.variances[i - 1], sampled_moments.variances[i - 1],
                     sampled_moments.se_var[i - 1]))
    for i in (1, 2, 3):
        se = sampled_moments.se_var[i - 1] / sampled_moments.mean_S0
        rows.append((f"nrf_S{i}", nrf(analytic_moments, i), nrf(sampled_moments, i), se))
    rows.append(("lhs", analytic.lhs, sampled.lhs, sampled.stderr))
    run.table("witness.csv", ["quantity", "analytic", "sampled", "stderr"], rows,
              threshold=analytic.threshold, violated=sampled.violated,
              violated_analytic=analytic.violated, sigma_below=sampled.sigma_below)


def _sweep_aperture(run: Run, threads: int) -> None:
    cfg = run.cfg
    config = experiment_config(cfg)
    d1 = np.linspace(cfg["sweep.d1_min_mm"], cfg["sweep.d1_max_mm"], cfg["sweep.points"]) * 1e-3
    points = mc.mode_mismatch_sweep(config, d1, cfg["aperture.d2_mm"] * 1e-3,
                                    cfg["aperture.lambda_a_nm"] * 1e-9, cfg["aperture.lambda_b_nm"] * 1e-9,
                                    threads=threads)
    rows = [(p.d1 * 1e3, p.ratio, p.matched, p.lhs_analytic, p.lhs, p.stderr) for p in points]
    best = min(points, key=lambda p: p.lhs_analytic)
    matched = mc.matched_d1(cfg["aperture.d2_mm"] * 1e-3, cfg["aperture.lambda_a_nm"] * 1e-9,
                            cfg["aperture.lambda_b_nm"] * 1e-9)
    run.table("sweep_aperture.csv",
              ["d1_mm", "ratio", "matched_fraction", "lhs_analytic", "lhs_sampled", "stderr"], rows,
              min_d1_mm=best.d1 * 1e3, matched_d1_mm=matched * 1e3)


def _phase_scan(cfg: Config, with_paths: bool) -> pl.PhaseScan:
    phi = np.linspace(0.0, 2 * math.pi, cfg["sweep.points"])
    paths = np.linspace(0.0, cfg["sweep.path_max_mm"], cfg["sweep.points"]) * 1e-3 if with_paths else ()
    return pl.mz_phase_scan(cfg["scan.gamma"], phi, paths, cfg["scan.coherence_time_ps"] * 1e-12)


def _sweep_phase(run: Run, threads: int) -> None:
    scan = _phase_scan(run.cfg, False)
    fit = scan.offset + scan.amplitude * np.cos(scan.phi)
    rows = zip(scan.phi, scan.nrf, fit)
    run.table("sweep_phase.csv", ["phi_rad", "nrf_s2", "fit"], rows,
              fit_offset=scan.offset, fit_amplitude=scan.amplitude,
              max_fit_residual=float(np.max(np.abs(scan.nrf - fit))),
              min_phi_rad=float(scan.phi[int(np.argmin(scan.nrf))]))


def _sweep_pathlength(run: Run, threads: int) -> None:
    cfg = run.cfg
    scan = _phase_scan(cfg, True)
    tau = cfg["scan.coherence_time_ps"] * 1e-12
    vis = [pl.coherence_visibility(x, tau) for x in scan.path_offsets]
    rows = zip(scan.path_offsets * 1e3, vis, scan.envelope_min, scan.envelope_max)
    run.table("sweep_pathlength.csv", ["path_offset_mm", "visibility", "nrf_min", "nrf_max"], rows,
              coherence_length_mm=pl.SPEED_OF_LIGHT * tau * 1e3)


def _sweep_efficiency(run: Run, threads: int) -> None:
    cfg = run.cfg
    rows = []
    for eta in np.linspace(cfg["sweep.eta_min"], cfg["sweep.eta_max"], cfg["sweep.points"]):
        config = experiment_config(cfg, eta=(float(eta),) * 4)
        if eta > 0:
            analytic = witness(mc.analytic_stokes_moments(config)).lhs
            sampled = witness(mc.estimate_stokes_for(config, mc.simulate_stokes_run(config, threads)))
            rows.append((eta, analytic, sampled.lhs, sampled.stderr))
        else:
            # no detected light: the witness is undefined
            rows.append((eta, None, None, None))
    run.table("sweep_efficiency.csv", ["eta", "lhs_analytic", "lhs_sampled", "stderr"], rows,
              crossing_eta=1.0 / 3.0)


SWEEPS = {"aperture": _sweep_aperture, "phase": _sweep_phase,
          "pathlength": _sweep_pathlength, "efficiency": _sweep_efficiency}


def run_sweep(run: Run, threads: int) -> None:
    SWEEPS[run.cfg["sweep.kind"]](run, threads)


def _histogram_rows(hist: mc.Histogram):
    return zip(hist.edges[:-1], hist.edges[1:], hist.counts)


def run_entanglement(run: Run, threads: int) -> None:
    cfg = run.cfg
    gamma, n = cfg["entanglement.gamma"], cfg["entanglement.mean_photons"]
    eta = cfg["entanglement.eta"]
    hist_cols = ["lo", "hi", "count"]
    if gamma == 0 or n == 0:
        # no light: every width and mode count collapses to one
        names = ["K_single", "K_product", "K_poisson", "K_asymptotic",
                 "R_ideal", "R_eta", "R_eta_symmetric", "R_mc"]
        rows = [("log_K_product", 0.0)] + [(q, 1.0) for q in names]
        run.table("entanglement.csv", ["quantity", "value"], rows, degenerate=True)
        return
    config = mc.operational_config(eta, n, gamma, cfg["entanglement.herald_eta"],
                                   pulses=cfg["entanglement.pulses"], seed=cfg["experiment.seed"],
                                   pump_jitter=cfg["experiment.pump_jitter"])
    report = schmidt.entanglement_report(gamma, config.n_pairs, n, eta)
    ens = mc.simulate(config, 1, threads)
    measure = mc.operational_measure(ens, config)
    herald = ens.counts("A")
    centre = int(round(herald.mean()))
    window = cfg["entanglement.window"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        post = mc.conditional_distribution(ens, "B", "A", (centre - window, centre + window))
    band = 0.05 * report.R_eta
    rows = [
        ("K_single", report.K_single), ("log_K_product", report.log_K_product),
        ("K_product", report.K_product), ("K_poisson", report.K_poisson),
        ("K_asymptotic", report.K_asymptotic), ("R_ideal", report.R_ideal),
        ("R_eta", report.R_eta),
        ("R_eta_symmetric", 1.0 / math.sqrt((1.0 - eta) * (1.0 + eta))),
        ("R_mc", measure.R), ("R_mc_band_lo", report.R_eta - band), ("R_mc_band_hi", report.R_eta + band),
        ("R_mc_within_band", abs(measure.R - report.R_eta) <= band),
    ]
    run.table("entanglement.csv", ["quantity", "value"], rows, degenerate=False,
              n_pairs=config.n_pairs, regression_slope=measure.slope)
    run.table("hist_unconditional.csv", hist_cols, _histogram_rows(measure.unconditional),
              fwhm=measure.unconditional.fwhm(), mean=measure.unconditional.mean)
    run.table("hist_conditional.csv", hist_cols, _histogram_rows(measure.conditional),
              fwhm=measure.conditional.fwhm(), mean=measure.conditional.mean)
    run.table("hist_postselected.csv", hist_cols, _histogram_rows(post),
              herald_lo=centre - window, herald_hi=centre + window, pulses=post.total,
              warning=post.warning or "none")


def run_calibrate(run: Run, threads: int) -> None:
    cfg = run.cfg
    config = experiment_config(cfg)
    result = mc.calibrate_shot_noise(config, cfg["calibration.levels"])
    fitted = result.var_diff - result.residuals
    rows = zip(result.levels, result.mean_sum, result.var_diff, fitted, result.residuals)
    run.table("calibration.csv", ["level", "mean_sum", "var_diff", "fitted", "residual"], rows,
              alpha=result.alpha, se_alpha=result.se_alpha,
              intercept=result.electronic_var, se_intercept=result.se_electronic_var)


def run_plate(run: Run, threads: int) -> None:
    cfg = run.cfg
    spec = pl.PlateSpec(cfg["plate.thickness_um"] * 1e-6, cfg["plate.material"],
                        cfg["aperture.lambda_a_nm"] * 1e-9, cfg["aperture.lambda_b_nm"] * 1e-9)
    gamma = cfg["state.gamma"]
    rows = []
    for label, lam in (("A", spec.lambda_a), ("B", spec.lambda_b)):
        rows.append((f"n_o_{label}", pl.refractive_index(lam, "ordinary", spec.material)))
        rows.append((f"n_e_{label}", pl.refractive_index(lam, "extraordinary", spec.material)))
        rows.append((f"oe_delay_{label}_pi", pl.oe_delay(spec, lam) / math.pi))
    delay_diff = (pl.oe_delay(spec, spec.lambda_a) - pl.oe_delay(spec, spec.lambda_b)) / math.pi
    residual = pl.residual_phase(spec)
    lhs = pl.converted_witness(gamma, spec) if gamma > 0 else None
    rows += [
        ("delay_difference_pi", delay_diff),
        ("residual_pi", residual / math.pi),
        ("converted_lhs", lhs),
        ("converted_lhs_bound", pl.converted_witness_bound(residual, gamma)),
        ("converted_violated", lhs is not None and lhs < 2.0),
    ]
    run.table("plate.csv", ["quantity", "value"], rows)


def run_oracle_check(run: Run, threads: int) -> None:
    cfg = run.cfg
    rng = mc.block_rng(cfg["experiment.seed"], 200, 0)
    rows, worst = [], 0.0
    for gamma in cfg["oracle.gammas"]:
        for kind in ("singlet", "psi_plus", "phi_minus", "phi_plus"):
            base_g = ge.make_state(kind, gamma)
            base_f = fock.build_state(kind, gamma)
            for r in range(cfg["oracle.rotations"] + 1):
                if r == 0:
                    g, f = base_g, base_f
                else:
                    rot = ge.PolarizationRotation.random(rng)
                    g, f = ge.apply_rotation(base_g, rot), fock.apply_rotation_fock(base_f, rot)
                a, b = stokes_moments_gaussian(g), fock.stokes_moments_exact(f)
                diff = float(max(np.max(np.abs(a.means - b.means)),
                                 np.max(np.abs(a.variances - b.variances))))
                worst = max(worst, diff)
                rows.append((gamma, kind, r, f.n_max, diff))
    run.table("oracle.csv", ["gamma", "state", "rotation", "n_max", "max_abs_diff"], rows,
              tolerance=ORACLE_TOL, max_abs_diff=worst, passed=worst <= ORACLE_TOL)
    if worst > ORACLE_TOL:
        run.flush()
        raise NumericFailure(f"engine and oracle differ by {worst:.3e} > {ORACLE_TOL:.0e}")


COMMANDS = {
    "witness": (run_witness, "witness from analytic moments and a simulated three-basis run"),
    "sweep": (run_sweep, "aperture, phase, pathlength or efficiency sweep"),
    "entanglement": (run_entanglement, "Schmidt numbers and the simulated width ratio"),
    "calibrate": (run_calibrate, "shot-noise calibration against a laser source"),
    "plate": (run_plate, "dichroic plate delays and the converted-state witness"),
    "oracle-check": (run_oracle_check, "Gaussian engine against the Fock oracle"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macrobell", description="Macroscopic polarization Bell-state simulator.",
        epilog=schema_help() + "\n\nexit codes: 0 success, 2 config error, 3 numeric failure",
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=schema_help(),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", help="config file (INI sections, key = value)")
        p.add_argument("--seed", type=int, help="overrides [experiment] seed")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--pulses", type=int, help="overrides [experiment] and [entanglement] pulses")
        p.add_argument("--threads", type=int, default=1, help="worker threads; never changes results")
        if name == "sweep":
            p.add_argument("--kind", choices=sorted(SWEEPS), help="overrides [sweep] kind")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["experiment.seed"] = args.seed
        if args.pulses is not None:
            overrides["experiment.pulses"] = args.pulses
            overrides["entanglement.pulses"] = args.pulses
        if getattr(args, "kind", None):
            overrides["sweep.kind"] = args.kind
        if overrides:
            cfg = cfg.with_overrides(**overrides)
            validate(cfg)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        run = Run(args.command, cfg, Path(args.out))
        COMMANDS[args.command][0](run, args.threads)
        run.flush()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFailure, mc.SimulationError, fock.TruncationError, WitnessUndefined,
            pl.WavelengthOutOfRange, ArithmeticError, ValueError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"wrote {', '.join(run.files + ['manifest.ini'])} to {run.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
