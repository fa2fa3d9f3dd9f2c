"""Command-line interface.

Subcommands
-----------
* ``run``: deterministic wave-optics computation of the camera-plane
  detection density for one configuration; writes profile CSVs and a
  key=value summary (plus the classical backward-wave prediction for
  single-mode ghost configurations).
* ``video``: seeded Monte Carlo of a photon-by-photon video: per-frame
  16-bit PGM images on a geometric photon ramp, the cumulative image, the
  event table, and a summary.
* ``analyze``: fringe metrology (period, visibility, widths) on an event CSV
  or a PGM image produced by ``video`` (or compatible data).
* ``selftest``: fast internal consistency battery.
* ``config-reference``: every configuration key with type, default, unit,
  provenance, and constraints.

Configuration is flat ``key = value`` text (``#`` comments allowed) plus
``--set key=value`` overrides.  Exit codes: 0 success, 2 configuration
error, 3 physics/consistency error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import __version__
from .analysis import Profile, cross_section, fringe_period, rms_width, visibility
from .detect import (
    DetectorParams,
    concat_events,
    intensify,
    plan_video_ramp,
    sample_events,
    timeline_stats,
)
from .errors import (
    ConfigError,
    ConstraintError,
    MalformedValueError,
    NoFringeError,
    PhysicsError,
    UnknownKeyError,
)
from .experiments import (
    ExperimentConfig,
    advanced_wave_predict,
    fringe_period_theory,
    run_experiment,
)
from .io_files import (
    read_events_csv,
    read_pgm16,
    write_events_csv,
    write_pgm16,
    write_profile_csv,
    write_summary,
)
from .kernels import BACKEND
from .selftest import run_selftest

__all__ = ["main", "parse_config", "CONFIG_KEYS"]


@dataclass(frozen=True)
class ConfigKey:
    name: str
    type: str  # "int" | "float" | "str"
    default: object
    provenance: str  # "apparatus" | "model default" | "numerical default" | "run default"
    help: str


CONFIG_KEYS: dict[str, ConfigKey] = {
    key.name: key
    for key in [
        ConfigKey("mode", "str", "heralded_diffraction", "run default",
                  "measurement arrangement: heralded_image, heralded_diffraction, "
                  "ghost_image, or ghost_diffraction"),
        ConfigKey("fiber", "str", "single", "run default",
                  "herald collection fiber: single or multi"),
        ConfigKey("fiber_modes", "int", 10, "model default",
                  "modes per transverse axis for the multimode fiber (>= 1)"),
        ConfigKey("fiber_waist_um", "float", 700.0, "model default",
                  "fiber-mode 1/e^2 intensity radius at the herald plane"),
        ConfigKey("pump_nm", "float", 355.0, "apparatus", "pump wavelength"),
        ConfigKey("signal_nm", "float", 710.0, "apparatus",
                  "signal (camera-arm) wavelength"),
        ConfigKey("herald_nm", "float", 710.0, "apparatus",
                  "herald (fiber-arm) wavelength; 1/pump = 1/signal + 1/herald "
                  "must hold to 1e-6"),
        ConfigKey("sigma_sum_um", "float", 500.0, "model default",
                  "joint-amplitude sum-coordinate width (position correlation scale)"),
        ConfigKey("sigma_diff_um", "float", 20.0, "model default",
                  "joint-amplitude difference-coordinate width (correlation sharpness); "
                  "must be resolved by the joint grid"),
        ConfigKey("slit_width_um", "float", 100.0, "apparatus",
                  "width of each slit; must be smaller than slit_sep_um"),
        ConfigKey("slit_sep_um", "float", 500.0, "apparatus",
                  "center-to-center slit separation"),
        ConfigKey("fourier_focal_mm", "float", 500.0, "apparatus",
                  "focal length of the far-field (diffraction) lens"),
        ConfigKey("image_focal1_mm", "float", 250.0, "apparatus",
                  "first focal length of the imaging relay"),
        ConfigKey("image_focal2_mm", "float", 250.0, "apparatus",
                  "second focal length of the imaging relay "
                  "(magnification = f2/f1)"),
        ConfigKey("crystal_length_mm", "float", 3.0, "informational",
                  "pair-source crystal length; accepted for record-keeping, no "
                  "effect on the transverse model"),
        ConfigKey("grid_n", "int", 4096, "numerical default",
                  "samples of the propagation grid (even, >= 64)"),
        ConfigKey("grid_extent_mm", "float", 16.0, "numerical default",
                  "physical extent of the propagation grid"),
        ConfigKey("joint_n", "int", 1024, "numerical default",
                  "samples per axis of the two-photon joint grid (even, >= 64)"),
        ConfigKey("joint_extent_mm", "float", 8.0, "numerical default",
                  "physical extent of the two-photon joint grid"),
        ConfigKey("camera_extent_mm", "float", 8.0, "numerical default",
                  "camera window; detection probability is restricted to it"),
        ConfigKey("supersample", "int", 8, "numerical default",
                  "sub-pixel samples per grid cell for slit-edge averaging (>= 1)"),
        ConfigKey("pixels_x", "int", 512, "apparatus", "camera pixels along x"),
        ConfigKey("pixels_y", "int", 512, "apparatus", "camera pixels along y"),
        ConfigKey("psf_sigma_px", "float", 1.5, "model default",
                  "intensifier splat Gaussian sigma, in pixels"),
        ConfigKey("gain_scale", "float", 200.0, "model default",
                  "mean intensifier counts deposited per photon event"),
        ConfigKey("pair_rate_hz", "float", 1e5, "apparatus",
                  "photon-pair generation rate"),
        ConfigKey("bs_split", "float", 0.5, "apparatus",
                  "beamsplitter probability of sending a photon to the herald arm"),
        ConfigKey("spad_qe", "float", 0.65, "apparatus",
                  "herald detector quantum efficiency"),
        ConfigKey("camera_qe", "float", 0.2, "apparatus",
                  "camera photocathode quantum efficiency"),
        ConfigKey("spad_dark_hz", "float", 100.0, "apparatus",
                  "herald detector dark-count rate (adds false triggers)"),
        ConfigKey("cathode_noise_hz", "float", 50.0, "apparatus",
                  "intensifier cathode noise rate (in-gate uniform events)"),
        ConfigKey("gate_ns", "float", 5.0, "apparatus",
                  "coincidence gate width"),
        ConfigKey("triggers", "int", 100000, "run default",
                  "herald triggers to simulate (video plans its own)"),
        ConfigKey("seed", "int", 12345, "run default",
                  "master seed; all randomness derives from it deterministically"),
        ConfigKey("video_photons", "int", 100000, "run default",
                  "total expected signal photons across the video"),
        ConfigKey("video_frames", "int", 60, "run default", "video frame count"),
        ConfigKey("video_ratio", "float", 1.15, "run default",
                  "geometric frame-to-frame photon budget ratio (>= 1)"),
    ]
}

_CHOICES = {
    "mode": ("heralded_image", "heralded_diffraction", "ghost_image", "ghost_diffraction"),
    "fiber": ("single", "multi"),
}


def _coerce(key: ConfigKey, raw: str) -> object:
    text = raw.strip()
    if key.type == "str":
        return text
    try:
        value = float(text)
    except ValueError:
        raise MalformedValueError(
            f"value {raw!r} for key {key.name!r} is not a number"
        ) from None
    if key.type == "int":
        if not float(value).is_integer():
            raise MalformedValueError(
                f"key {key.name!r} needs an integer, got {raw!r}"
            )
        return int(value)
    return value


def parse_config(
    text: str = "", overrides: Iterable[str] = ()
) -> dict[str, object]:
    """Parse flat ``key = value`` configuration text plus override strings.

    Unknown keys, malformed values, and constraint violations raise the
    corresponding :class:`~heraldlab.errors.ConfigError` subclass.  All keys
    receive defaults; cross-key constraints are checked here and again by
    the physics layer.
    """
    values: dict[str, object] = {k: key.default for k, key in CONFIG_KEYS.items()}

    def _apply(line: str, where: str) -> None:
        body = line.split("#", 1)[0].strip()
        if not body:
            return
        if "=" not in body:
            raise MalformedValueError(f"{where}: expected 'key = value', got {line!r}")
        name, raw = body.split("=", 1)
        name = name.strip()
        if name not in CONFIG_KEYS:
            raise UnknownKeyError(f"{where}: unknown configuration key {name!r}")
        values[name] = _coerce(CONFIG_KEYS[name], raw)

    for i, line in enumerate(text.splitlines(), start=1):
        _apply(line, f"line {i}")
    for i, line in enumerate(overrides, start=1):
        _apply(line, f"override {i}")

    for name, choices in _CHOICES.items():
        if values[name] not in choices:
            raise ConstraintError(
                f"key {name!r} must be one of {choices}, got {values[name]!r}"
            )
    if values["slit_width_um"] >= values["slit_sep_um"]:  # type: ignore[operator]
        raise ConstraintError(
            f"slit_width_um ({values['slit_width_um']}) must be smaller than "
            f"slit_sep_um ({values['slit_sep_um']}); the slits overlap"
        )
    for name in ("triggers", "video_photons", "video_frames"):
        if values[name] < 1:  # type: ignore[operator]
            raise ConstraintError(f"key {name!r} must be >= 1, got {values[name]}")
    if values["seed"] < 0:  # type: ignore[operator]
        raise ConstraintError(f"key 'seed' must be nonnegative, got {values['seed']}")
    if values["video_ratio"] < 1.0:  # type: ignore[operator]
        raise ConstraintError(
            f"key 'video_ratio' must be >= 1, got {values['video_ratio']}"
        )
    # Build the physics config eagerly so its validators (positivity, energy
    # conservation, grid parity) run at parse time.
    experiment_config(values)
    detector_params(values)
    return values


def experiment_config(values: Mapping[str, object]) -> ExperimentConfig:
    v = values
    return ExperimentConfig(
        mode=str(v["mode"]),
        fiber=str(v["fiber"]),
        n_fiber_modes=int(v["fiber_modes"]),  # type: ignore[arg-type]
        fiber_waist=float(v["fiber_waist_um"]) * 1e-6,  # type: ignore[arg-type]
        wavelength_pump=float(v["pump_nm"]) * 1e-9,  # type: ignore[arg-type]
        wavelength_signal=float(v["signal_nm"]) * 1e-9,  # type: ignore[arg-type]
        wavelength_herald=float(v["herald_nm"]) * 1e-9,  # type: ignore[arg-type]
        sigma_sum=float(v["sigma_sum_um"]) * 1e-6,  # type: ignore[arg-type]
        sigma_diff=float(v["sigma_diff_um"]) * 1e-6,  # type: ignore[arg-type]
        slit_width=float(v["slit_width_um"]) * 1e-6,  # type: ignore[arg-type]
        slit_separation=float(v["slit_sep_um"]) * 1e-6,  # type: ignore[arg-type]
        focal_fourier=float(v["fourier_focal_mm"]) * 1e-3,  # type: ignore[arg-type]
        focal_image_in=float(v["image_focal1_mm"]) * 1e-3,  # type: ignore[arg-type]
        focal_image_out=float(v["image_focal2_mm"]) * 1e-3,  # type: ignore[arg-type]
        grid_n=int(v["grid_n"]),  # type: ignore[arg-type]
        grid_extent=float(v["grid_extent_mm"]) * 1e-3,  # type: ignore[arg-type]
        joint_n=int(v["joint_n"]),  # type: ignore[arg-type]
        joint_extent=float(v["joint_extent_mm"]) * 1e-3,  # type: ignore[arg-type]
        camera_extent=float(v["camera_extent_mm"]) * 1e-3,  # type: ignore[arg-type]
        supersample=int(v["supersample"]),  # type: ignore[arg-type]
    )


def detector_params(values: Mapping[str, object]) -> DetectorParams:
    v = values
    return DetectorParams(
        pixels_x=int(v["pixels_x"]),  # type: ignore[arg-type]
        pixels_y=int(v["pixels_y"]),  # type: ignore[arg-type]
        camera_extent_x=float(v["camera_extent_mm"]) * 1e-3,  # type: ignore[arg-type]
        camera_extent_y=float(v["camera_extent_mm"]) * 1e-3,  # type: ignore[arg-type]
        psf_sigma_px=float(v["psf_sigma_px"]),  # type: ignore[arg-type]
        gain_scale=float(v["gain_scale"]),  # type: ignore[arg-type]
        pair_rate=float(v["pair_rate_hz"]),  # type: ignore[arg-type]
        bs_split=float(v["bs_split"]),  # type: ignore[arg-type]
        spad_qe=float(v["spad_qe"]),  # type: ignore[arg-type]
        camera_qe=float(v["camera_qe"]),  # type: ignore[arg-type]
        spad_dark_rate=float(v["spad_dark_hz"]),  # type: ignore[arg-type]
        cathode_noise_rate=float(v["cathode_noise_hz"]),  # type: ignore[arg-type]
        gate=float(v["gate_ns"]) * 1e-9,  # type: ignore[arg-type]
    )


def _load_values(args: argparse.Namespace) -> dict[str, object]:
    text = ""
    if args.config is not None:
        with open(args.config) as fh:
            text = fh.read()
    return parse_config(text, args.set or [])


def _profile_report(profile_x: Profile, profile_y: Profile) -> dict[str, object]:
    report: dict[str, object] = {}
    try:
        report["fringe_period_m"] = fringe_period(profile_x)
    except NoFringeError:
        report["fringe_period_m"] = "none"
    report["visibility_x"] = visibility(profile_x)
    report["rms_width_x_m"] = rms_width(profile_x)
    report["rms_width_y_m"] = rms_width(profile_y)
    return report


def cmd_run(args: argparse.Namespace) -> int:
    values = _load_values(args)
    cfg = experiment_config(values)
    params = detector_params(values)
    pmap = run_experiment(cfg)
    stats = timeline_stats(params)

    os.makedirs(args.out, exist_ok=True)
    write_profile_csv(os.path.join(args.out, "profile_x.csv"), pmap.x, "x_m")
    write_profile_csv(os.path.join(args.out, "profile_y.csv"), pmap.y, "y_m")

    summary: dict[str, object] = {
        "mode": cfg.mode,
        "fiber": cfg.fiber,
        "herald_probability": pmap.herald_probability,
        "herald_rate_hz": stats.herald_rate,
        "trigger_rate_hz": stats.trigger_rate,
        "true_coincidence_prob": stats.true_coincidence_prob,
        "accidental_mean_per_trigger": stats.accidental_mean,
        "blank_prob": stats.blank_prob,
        "fringe_period_theory_m": fringe_period_theory(cfg),
        "in_window_x": pmap.meta["x"]["in_window"],
        "in_window_y": pmap.meta["y"]["in_window"],
    }
    summary.update(_profile_report(pmap.x, pmap.y))
    if cfg.is_ghost and cfg.fiber == "single":
        prediction = advanced_wave_predict(cfg)
        write_profile_csv(
            os.path.join(args.out, "backward_wave_x.csv"), prediction, "x_m"
        )
        common = np.interp(pmap.x.coords, prediction.coords, prediction.values)
        denom = float(np.sum(pmap.x.values**2))
        summary["backward_wave_rel_l2"] = float(
            np.sqrt(np.sum((common - pmap.x.values) ** 2) / denom)
        )
    write_summary(os.path.join(args.out, "summary.txt"), summary)
    sys.stdout.write(f"wrote {args.out}/profile_x.csv profile_y.csv summary.txt\n")
    for key, value in summary.items():
        sys.stdout.write(f"{key} = {value}\n")
    return 0


def cmd_video(args: argparse.Namespace) -> int:
    values = _load_values(args)
    cfg = experiment_config(values)
    params = detector_params(values)
    seed = int(values["seed"])  # type: ignore[arg-type]
    pmap = run_experiment(cfg)
    stats = timeline_stats(params)

    budgets = plan_video_ramp(
        int(values["video_photons"]),  # type: ignore[arg-type]
        int(values["video_frames"]),  # type: ignore[arg-type]
        float(values["video_ratio"]),  # type: ignore[arg-type]
        n_pixels=params.pixels_x * params.pixels_y,
    )
    per_frame = [
        max(1, int(round(b / stats.true_coincidence_prob))) for b in budgets
    ]
    streams = [
        sample_events(pmap, params, n_triggers, seed, frame=f)
        for f, n_triggers in enumerate(per_frame)
    ]
    events = concat_events(streams)
    stack = intensify(events, params, seed, n_frames=len(budgets), budgets=budgets)

    os.makedirs(args.out, exist_ok=True)
    for f in range(stack.n_frames):
        write_pgm16(os.path.join(args.out, f"frame_{f:03d}.pgm"), stack.counts[f])
    write_pgm16(os.path.join(args.out, "cumulative.pgm"), stack.cumulative())
    write_events_csv(os.path.join(args.out, "events.csv"), events)

    kinds = events.counts_by_kind()
    summary: dict[str, object] = {
        "mode": cfg.mode,
        "fiber": cfg.fiber,
        "seed": seed,
        "deposition_backend": BACKEND,
        "n_frames": stack.n_frames,
        "n_triggers": events.n_triggers,
        "n_events": len(events),
        "events_signal": kinds["Signal"],
        "events_dark": kinds["Dark"],
        "events_cathode_noise": kinds["CathodeNoise"],
        "photon_budget_total": int(budgets.sum()),
        "photon_budgets": ",".join(str(int(b)) for b in budgets),
        "herald_probability": pmap.herald_probability,
        "true_coincidence_prob": stats.true_coincidence_prob,
    }
    write_summary(os.path.join(args.out, "summary.txt"), summary)
    sys.stdout.write(
        f"wrote {stack.n_frames} frames, cumulative.pgm, events.csv, summary.txt "
        f"to {args.out} ({len(events)} events, backend={BACKEND})\n"
    )
    return 0


def _profiles_from_image(
    image: np.ndarray, extent_x: float, extent_y: float
) -> tuple[Profile, Profile]:
    height, width = image.shape
    x = (np.arange(width) - width // 2 + 0.5) * (extent_x / width)
    y = (np.arange(height) - height // 2 + 0.5) * (extent_y / height)
    total = image.astype(np.float64)
    if total.sum() <= 0:
        raise PhysicsError("image contains no counts to analyze")
    profile_x = cross_section(total, x, y, axis="x")
    profile_y = cross_section(total, x, y, axis="y")
    return profile_x, profile_y


def cmd_analyze(args: argparse.Namespace) -> int:
    if (args.events is None) == (args.image is None):
        raise ConfigError("analyze needs exactly one of --events or --image")
    extent_x = args.extent_mm * 1e-3
    extent_y = args.extent_mm * 1e-3

    report: dict[str, object] = {}
    if args.events is not None:
        events = read_events_csv(args.events)
        if len(events) == 0:
            raise PhysicsError(f"event table {args.events} is empty")
        pixels_x = int(events.ix.max()) + 1 if args.pixels is None else args.pixels
        pixels_y = int(events.iy.max()) + 1 if args.pixels is None else args.pixels
        image = np.zeros((pixels_y, pixels_x), dtype=np.float64)
        np.add.at(image, (events.iy, events.ix), 1.0)
        for code, name in enumerate(("signal", "dark", "cathode_noise")):
            report[f"events_{name}"] = int(np.count_nonzero(events.kind == code))
    else:
        image = read_pgm16(args.image).astype(np.float64)
    profile_x, profile_y = _profiles_from_image(image, extent_x, extent_y)
    report["n_counts"] = int(image.sum())
    report.update(_profile_report(profile_x, profile_y))

    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        write_profile_csv(os.path.join(args.out, "profile_x.csv"), profile_x, "x_m")
        write_profile_csv(os.path.join(args.out, "profile_y.csv"), profile_y, "y_m")
        write_summary(os.path.join(args.out, "summary.txt"), report)
    for key, value in report.items():
        sys.stdout.write(f"{key} = {value}\n")
    return 0


def cmd_selftest(_args: argparse.Namespace) -> int:
    results = run_selftest()
    failed = 0
    for name, ok, detail in results:
        status = "ok  " if ok else "FAIL"
        sys.stdout.write(f"{status} {name}: {detail}\n")
        failed += 0 if ok else 1
    sys.stdout.write(
        f"{len(results) - failed}/{len(results)} checks passed "
        f"(deposition backend: {BACKEND})\n"
    )
    return 0 if failed == 0 else 3


def cmd_config_reference(_args: argparse.Namespace) -> int:
    rows = [
        (key.name, key.type, str(key.default), key.provenance, key.help)
        for key in CONFIG_KEYS.values()
    ]
    widths = [max(len(r[i]) for r in rows + [("key", "type", "default", "provenance", "")])
              for i in range(4)]
    header = ("key", "type", "default", "provenance")
    line = "  ".join(h.ljust(widths[i]) for i, h in enumerate(header))
    sys.stdout.write(line + "  description\n")
    sys.stdout.write("-" * (len(line) + 13) + "\n")
    for name, typ, default, provenance, help_text in rows:
        sys.stdout.write(
            f"{name.ljust(widths[0])}  {typ.ljust(widths[1])}  "
            f"{default.ljust(widths[2])}  {provenance.ljust(widths[3])}  {help_text}\n"
        )
    sys.stdout.write(
        "\nconstraints: energy conservation 1/pump_nm = 1/signal_nm + 1/herald_nm "
        "(1e-6 relative); slit_width_um < slit_sep_um; sigma_diff_um resolved by "
        "the joint grid; grid_n and joint_n even; video_ratio >= 1; probabilities "
        "in (0, 1].\n"
    )
    return 0


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to a key = value configuration file")
    parser.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override one configuration key (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heraldlab",
        description=(
            "Deterministic simulator of heralded single-photon double-slit "
            "experiments: heralded/ghost imaging and diffraction, "
            "photon-by-photon video, and fringe analysis."
        ),
    )
    parser.add_argument("--version", action="version", version=f"heraldlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="compute detection densities and fringe metrics")
    _add_config_arguments(p_run)
    p_run.add_argument("--out", default="run_out", help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_video = sub.add_parser("video", help="simulate a photon-by-photon video")
    _add_config_arguments(p_video)
    p_video.add_argument("--out", default="video_out", help="output directory")
    p_video.set_defaults(func=cmd_video)

    p_an = sub.add_parser("analyze", help="measure fringes in events or images")
    p_an.add_argument("--events", help="events.csv produced by the video command")
    p_an.add_argument("--image", help="16-bit PGM image (e.g. cumulative.pgm)")
    p_an.add_argument(
        "--extent-mm",
        type=float,
        default=8.0,
        help="physical extent covered by the image/sensor (default 8)",
    )
    p_an.add_argument(
        "--pixels",
        type=int,
        default=None,
        help="sensor pixels per axis for event data (default: inferred)",
    )
    p_an.add_argument("--out", default=None, help="optional output directory")
    p_an.set_defaults(func=cmd_analyze)

    p_self = sub.add_parser("selftest", help="run internal consistency checks")
    p_self.set_defaults(func=cmd_selftest)

    p_ref = sub.add_parser(
        "config-reference", help="list all configuration keys and defaults"
    )
    p_ref.set_defaults(func=cmd_config_reference)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args))
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return 2
    except PhysicsError as exc:
        sys.stderr.write(f"physics error: {exc}\n")
        return 3
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return 4


if __name__ == "__main__":
    sys.exit(main())
