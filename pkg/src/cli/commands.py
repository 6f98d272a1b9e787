"""
Comandos de la CLI compuestos por etapas (_stage_*).

Todas las semillas se derivan de config.seed con SeedSequence, de modo que la
misma configuración reproduce los mismos bytes en cada archivo emitido (salvo
los manifiestos, que llevan timestamps).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from src.cli.config import ExperimentConfig, FaultKind
from src.cli.manifest import RunManifest
from src.core.config import settings
from src.core.exceptions import EmptyKernelError, VerificationError
from src.detect.baselines import baseline_ls_output, baseline_parity, residual_dimensions
from src.detect.evaluation import run_detection
from src.detect.models import Detector, DetectionReport
from src.detect.trainer import train_detector
from src.io.detector import dumps_detector, loads_detector
from src.io.report import dumps_json, dumps_report_csv, dumps_report_summary
from src.io.signals import FLOAT_FMT, dumps_signals, loads_signals
from src.ltisim.models import StateSpaceModel, Trajectory
from src.ltisim.random_models import random_minimal_model
from src.ltisim.simulator import gaussian_input, simulate
from src.ltisim.structure import observability_index
from src.storage.local import LocalStorage
from src.verification.suite import CheckResult, failed_labels, run_suite

logger = logging.getLogger(__name__)

SEED_NAMES = ("training_input", "training_noise", "test_input", "test_noise", "verify", "bench")
BENCH_METHODS = ("projection", "parity", "ls_output")


def derive_seeds(seed: int) -> dict[str, int]:
    """Semillas independientes por etapa a partir de una semilla raíz."""
    children = np.random.SeedSequence(seed).spawn(len(SEED_NAMES))
    return {name: int(child.generate_state(1)[0]) for name, child in zip(SEED_NAMES, children)}


@dataclass
class RunContext:
    config: ExperimentConfig
    base_dir: Path
    out_dir: Path
    quiet: bool = False

    @cached_property
    def storage(self) -> LocalStorage:
        return LocalStorage(str(self.out_dir))

    @cached_property
    def model(self) -> StateSpaceModel:
        return self.config.model.build(self.base_dir)

    @cached_property
    def seeds(self) -> dict[str, int]:
        return derive_seeds(self.config.seed)

    def manifest(self, command: str) -> RunManifest:
        return RunManifest(
            command=command,
            config=self.config.model_dump(mode="json"),
            seed=self.config.seed,
            seeds=self.seeds,
        )

    def echo(self, text: str = "") -> None:
        if not self.quiet:
            print(text)

    def banner(self, title: str) -> None:
        self.echo("=" * 60)
        self.echo(title)
        self.echo("=" * 60)


# --- Etapas ---


def _stage_simulate(
    config: ExperimentConfig,
    model: StateSpaceModel,
    seeds: dict[str, int],
    amplitude: float | None = None,
    fault_kind: FaultKind | None = None,
) -> tuple[Trajectory, Trajectory]:
    """Trayectoria nominal de entrenamiento y trayectoria de prueba con la falla configurada."""
    noise = config.noise.build(model.n, model.m)
    u_train = gaussian_input(config.training_horizon, model.p, seeds["training_input"], config.input_std)
    training = simulate(model, u_train, noise=noise, seed=seeds["training_noise"])
    faults = config.fault.build(model.p, model.m, amplitude=amplitude, kind=fault_kind)
    u_test = gaussian_input(config.horizon, model.p, seeds["test_input"], config.input_std)
    test = simulate(model, u_test, noise=noise, faults=faults, seed=seeds["test_noise"])
    return training, test


def _gamma(config: ExperimentConfig, p: int):
    if config.latent_margin == "auto":
        return "auto"
    return config.window * p + config.latent_margin


def _stage_train(config: ExperimentConfig, training: Trajectory, n_hint: int | None = None) -> Detector:
    return train_detector(
        training,
        config.window,
        gamma=_gamma(config, training.p),
        mode=config.mode,
        alpha=config.alpha,
        C=config.C,
        ridge=config.ridge,
        n_hint=n_hint,
    )


def _stage_load_signals(ctx: RunContext, path: str | None, default: str) -> Trajectory:
    target = str(Path(path) if path else ctx.out_dir / default)
    ctx.storage.require(target, "ejecute primero 'simulate'")
    return loads_signals(ctx.storage.read_text(target))


def _stage_bench_trial(
    config: ExperimentConfig, model: StateSpaceModel, trial: int
) -> dict[tuple[str, float], DetectionReport]:
    """Un ensayo: entrena los tres métodos sobre los mismos datos y barre las amplitudes."""
    seeds = derive_seeds(int(np.random.SeedSequence([config.seed, trial]).generate_state(1)[0]))
    training, _ = _stage_simulate(config, model, seeds, amplitude=0.0)
    s, rho = config.window, config.bench.rho
    kwargs = {"alpha": config.alpha, "ridge": config.ridge}

    detectors: dict[str, Detector] = {
        "projection": train_detector(
            training, s, gamma=_gamma(config, model.p), alpha=config.alpha, ridge=config.ridge,
            n_hint=model.n,
        ),
    }
    try:
        detectors["parity"] = baseline_parity(model, s).to_detector(training, **kwargs)
    except EmptyKernelError as e:
        logger.warning("Paridad omitida: %s", e)
    detectors["ls_output"] = baseline_ls_output(training, s - rho, rho, ridge=1e-10).to_detector(
        training, **kwargs
    )

    results = {}
    for amplitude in config.bench.amplitudes:
        _, test = _stage_simulate(config, model, seeds, amplitude, config.bench.fault_kind)
        for method, det in detectors.items():
            results[(method, amplitude)] = run_detection(det, test)
    return results


def _mean(values: list[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


def _fmt(value: float | None) -> str:
    return "" if value is None else FLOAT_FMT % value


# --- Comandos ---


def cmd_simulate(ctx: RunContext) -> dict[str, str]:
    """Escribe la trayectoria de entrenamiento (sin fallas) y la de prueba."""
    config = ctx.config
    manifest = ctx.manifest("simulate")
    ctx.banner("FSFD - Simulación")
    model = ctx.model
    ctx.echo(f"Modelo: n={model.n}, p={model.p}, m={model.m} | N={config.horizon}, s={config.window}")

    training, test = _stage_simulate(config, model, ctx.seeds)
    paths = {
        "training": ctx.storage.save_text(dumps_signals(training), config.outputs.training_signals),
        "signals": ctx.storage.save_text(dumps_signals(test), config.outputs.signals),
    }
    manifest.finish(list(paths.values())).save(ctx.storage)
    ctx.echo(f"\nEntrenamiento: {paths['training']}")
    ctx.echo(f"Prueba: {paths['signals']} ({int(test.labels.sum())} muestras con falla)")
    return paths


def cmd_train(ctx: RunContext, signals_path: str | None = None) -> str:
    """Entrena el detector con la trayectoria nominal y lo serializa."""
    config = ctx.config
    manifest = ctx.manifest("train")
    ctx.banner("FSFD - Entrenamiento")
    training = _stage_load_signals(ctx, signals_path, config.outputs.training_signals)
    detector = _stage_train(config, training, n_hint=ctx.model.n)
    path = ctx.storage.save_text(dumps_detector(detector), config.outputs.detector)
    manifest.finish([path]).save(ctx.storage)
    ctx.echo(f"Modo: {detector.mode} | γ = {detector.meta.gamma} | θ' = {detector.theta}")
    ctx.echo(f"Umbral: {detector.threshold:.6g}")
    ctx.echo(f"\nDetector: {path}")
    return path


def cmd_detect(
    ctx: RunContext, detector_path: str | None = None, signals_path: str | None = None
) -> dict[str, str]:
    """Evalúa el detector sobre las señales de prueba; escribe CSV por ventana y resumen JSON."""
    config = ctx.config
    manifest = ctx.manifest("detect")
    ctx.banner("FSFD - Detección")
    det_file = str(Path(detector_path) if detector_path else ctx.out_dir / config.outputs.detector)
    ctx.storage.require(det_file, "ejecute primero 'train'")
    detector = loads_detector(ctx.storage.read_text(det_file))
    test = _stage_load_signals(ctx, signals_path, config.outputs.signals)

    report = run_detection(
        detector, test, config={"mode": detector.mode, **detector.meta.to_dict()}, seeds={"seed": config.seed}
    )
    stem = config.outputs.report
    paths = {
        "csv": ctx.storage.save_text(dumps_report_csv(report), f"{stem}.csv"),
        "summary": ctx.storage.save_text(dumps_report_summary(report), f"{stem}.json"),
    }
    manifest.finish(list(paths.values())).save(ctx.storage)
    ctx.echo(f"Ventanas: {report.windows} | FAR: {report.far} | MDR: {report.mdr}")
    ctx.echo(f"Retardo de detección: {report.detection_delay}")
    ctx.echo(f"\nReporte: {paths['csv']}")
    return paths


def _verify_targets(ctx: RunContext) -> list[tuple[str, StateSpaceModel, int]]:
    config = ctx.config
    targets = [("configured", ctx.model, config.window)]
    rng = np.random.default_rng(ctx.seeds["verify"])
    for index in range(config.verify.random_models):
        n = int(rng.integers(1, 5))
        p, m = (int(v) for v in rng.integers(1, 4, size=2))
        model = random_minimal_model(rng, n, p, m)
        targets.append((f"random-{index}", model, n + config.verify.window_margin))
    return targets


def cmd_verify(ctx: RunContext) -> list[tuple[str, CheckResult]]:
    """
    Ejecuta la suite sobre el modelo configurado y `verify.random_models` modelos aleatorios.

    Raises:
        VerificationError: Si algún chequeo falla (después de escribir el reporte)
    """
    config = ctx.config
    manifest = ctx.manifest("verify")
    ctx.banner("FSFD - Verificación")
    rows: list[tuple[str, CheckResult]] = []
    for name, model, s in _verify_targets(ctx):
        mu = observability_index(model)
        ctx.echo(f"\n{name}: n={model.n}, p={model.p}, m={model.m}, s={s}, μ={mu}")
        for result in run_suite(model, s, seed=config.seed, noise_std=config.verify.noise_std):
            rows.append((name, result))
            value = "" if result.value is None else f"{result.value:.3e}"
            ctx.echo(f"  {result.label:<32} {result.status:<5} {value}")

    payload = {"checks": [{"model": name, **result.to_dict()} for name, result in rows]}
    path = ctx.storage.save_text(dumps_json(payload), config.outputs.verification)
    manifest.finish([path]).save(ctx.storage)

    failed = sorted({f"{name}:{label}" for name, result in rows for label in failed_labels([result])})
    if failed:
        raise VerificationError(f"Chequeos fallidos: {', '.join(failed)}", failed)
    ctx.echo("Todos los chequeos aplicables pasaron")
    return rows


def cmd_bench(ctx: RunContext) -> dict[str, str]:
    """Tabla FAR/MDR/retardo por método y amplitud de falla (media sobre ensayos)."""
    config = ctx.config
    manifest = ctx.manifest("bench")
    ctx.banner("FSFD - Benchmark")
    model = ctx.model
    trials = range(config.bench.trials)
    with ThreadPoolExecutor(max_workers=max(1, settings.FSFD_THREADS)) as pool:
        outcomes = list(pool.map(lambda t: _stage_bench_trial(config, model, t), trials))

    lines = ["method,amplitude,far,mdr,mdr_settled,detection_delay,trials"]
    for method in BENCH_METHODS:
        for amplitude in config.bench.amplitudes:
            reports = [o[(method, amplitude)] for o in outcomes if (method, amplitude) in o]
            if not reports:
                continue
            delays = [None if r.detection_delay is None else float(r.detection_delay) for r in reports]
            row = [
                method,
                FLOAT_FMT % amplitude,
                _fmt(_mean([r.far for r in reports])),
                _fmt(_mean([r.mdr for r in reports])),
                _fmt(_mean([r.mdr_settled for r in reports])),
                _fmt(_mean(delays)),
                str(len(reports)),
            ]
            lines.append(",".join(row))
            ctx.echo(f"  {method:<11} a={amplitude:<6g} FAR={row[2] or 'N/A':<10} MDR={row[3] or 'N/A'}")

    rho = config.bench.rho
    dims = residual_dimensions(config.window - rho, rho, model.p, model.m, model.n)
    paths = {
        "table": ctx.storage.save_text("\n".join(lines) + "\n", config.outputs.bench),
        "dimensions": ctx.storage.save_text(
            dumps_json({"residual_dimensions": dims, "window": config.window, "rho": rho}),
            Path(config.outputs.bench).with_suffix(".json").name,
        ),
    }
    manifest.finish(list(paths.values())).save(ctx.storage)
    ctx.echo(f"\nTabla: {paths['table']}")
    return paths
