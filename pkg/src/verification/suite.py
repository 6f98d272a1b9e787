"""
Suite de verificación numérica de las construcciones exactas y de las propiedades
de subespacio sobre un modelo dado.

Cada chequeo devuelve un CheckResult; los que requieren subespacio residual
no vacío se reportan como "n/a" cuando s <= μ_obs.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy import linalg

from src.core.config import settings
from src.core.exceptions import FsfdError
from src.detect.baselines import baseline_parity
from src.ltisim.gains import deadbeat_gain, kalman_gain
from src.ltisim.models import NoiseModel, StateSpaceModel
from src.ltisim.residuals import latent_signals, observer_residual
from src.ltisim.simulator import _generator, gaussian_input, simulate
from src.ltisim.structure import observability_index
from src.representations.controller import controller_image_rep
from src.representations.image import image_rep
from src.representations.kernel import kernel_rep
from src.representations.params import param_R_Rbar, param_V
from src.representations.profile import rank_profile
from src.representations.psi import psi_stack
from src.sigkit.hankel import build_hankel
from src.sigkit.rank import numerical_rank
from src.subspace.data_matrix import align_data, build_data_matrix, latent_hankels
from src.subspace.decomposition import column_basis, gap_metric
from src.subspace.fundamental_lemma import fundamental_lemma_check
from src.subspace.perturbation import davis_kahan_oracle_bound

logger = logging.getLogger(__name__)

Status = Literal["pass", "fail", "n/a"]

@dataclass(frozen=True)
class CheckResult:
    label: str
    status: Status
    value: float | None = None
    tolerance: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "status": self.status,
            "value": self.value,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class SuiteContext:
    model: StateSpaceModel
    s: int
    seed: int
    noise_std: float

    @property
    def rng(self) -> np.random.Generator:
        return _generator(self.seed)

    @property
    def has_residual(self) -> bool:
        return self.s > observability_index(self.model)

    def random_gains(self, salt: int = 0) -> tuple[np.ndarray, np.ndarray]:
        rng = _generator(self.seed + 7919 * (salt + 1))
        n, p, m = self.model.n, self.model.p, self.model.m
        return 0.3 * rng.standard_normal((p, n)), 0.3 * rng.standard_normal((n, m))

    def samples(self) -> int:
        p, m, s = self.model.p, self.model.m, self.s
        return 2 * (s * (p + m) + s) + self.model.n


def _rel(residual: float, scale: float) -> float:
    return residual / max(1.0, scale)


def _result(label: str, value: float, tol: float, detail: str = "") -> CheckResult:
    return CheckResult(label, "pass" if value <= tol else "fail", float(value), tol, detail)


def check_rank_law(ctx: SuiteContext) -> CheckResult:
    F, _ = ctx.random_gains()
    model, s = ctx.model, ctx.s
    rank = numerical_rank(image_rep(model, F, s).stacked)
    # con s >= μ_obs O_s tiene rango completo y la ley es sp+n
    if s >= observability_index(model):
        expected, law = s * model.p + model.n, "sp+n"
    else:
        expected, law = s * model.p + rank_profile(model, s).beta, "sp+β"
    return CheckResult(
        "rank-law", "pass" if rank == expected else "fail", float(rank), float(expected),
        f"rank([M_s; N_s]) = {rank}, esperado {law} = {expected}",
    )


def check_image_reparameterization(ctx: SuiteContext) -> CheckResult:
    F1, _ = ctx.random_gains(0)
    F2, _ = ctx.random_gains(1)
    first = image_rep(ctx.model, F1, ctx.s)
    second = image_rep(ctx.model, F2, ctx.s)
    V = param_V(ctx.model, F1, F2, ctx.s)
    residual = max(
        linalg.norm(first.M_s - second.M_s @ V, 2),
        linalg.norm(first.N_s - second.N_s @ V, 2),
    )
    scale = linalg.norm(second.stacked, 2) * linalg.norm(V, 2)
    return _result("image-reparameterization", _rel(residual, scale), settings.IDENTITY_TOL)


def check_controller_reparameterization(ctx: SuiteContext) -> CheckResult:
    F_d = deadbeat_gain(ctx.model, seed=ctx.seed)
    _, L1 = ctx.random_gains(0)
    _, L2 = ctx.random_gains(1)
    first = controller_image_rep(ctx.model, F_d, L1, ctx.s, method="toeplitz")
    second = controller_image_rep(ctx.model, F_d, L2, ctx.s, method="toeplitz")
    base = image_rep(ctx.model, F_d, ctx.s)
    R, Rbar = param_R_Rbar(ctx.model, F_d, L1, F_d, L2, ctx.s)
    rhs = np.block([[base.M_s, second.Y_hat_s], [base.N_s, second.X_hat_s]]) @ np.vstack([Rbar, R])
    residual = linalg.norm(first.stacked - rhs, 2)
    return _result("controller-reparameterization", _rel(residual, linalg.norm(rhs, 2)), settings.IDENTITY_TOL)


def check_psi_factorization(ctx: SuiteContext) -> CheckResult:
    F, L = ctx.random_gains()
    psi = psi_stack(ctx.model, F, L, ctx.s)
    direct = np.hstack([
        image_rep(ctx.model, F, ctx.s).stacked,
        controller_image_rep(ctx.model, F, L, ctx.s, method="toeplitz").stacked,
    ])
    residual = linalg.norm(psi.Psi_s - direct, 2)
    return _result("psi-factorization", _rel(residual, linalg.norm(direct, 2)), settings.IDENTITY_TOL)


def check_psi_rank(ctx: SuiteContext) -> CheckResult:
    F, L = ctx.random_gains()
    psi = psi_stack(ctx.model, F, L, ctx.s)
    expected = ctx.s * (ctx.model.p + ctx.model.m)
    rank = numerical_rank(psi.Psi_s)
    return CheckResult("psi-rank", "pass" if rank == expected else "fail", float(rank), float(expected))


def check_kernel_certificates(ctx: SuiteContext) -> CheckResult:
    F, _ = ctx.random_gains()
    kernel = kernel_rep(ctx.model, ctx.s)
    I_G = image_rep(ctx.model, F, ctx.s).stacked
    residual = linalg.norm(kernel.K_Gs @ I_G, 2)
    scale = linalg.norm(kernel.K_Gs, 2) * linalg.norm(I_G, 2)
    return _result("kernel-certificates", _rel(residual, scale), settings.RANK_REL_TOL * I_G.shape[0])


def _noisy_trajectory(ctx: SuiteContext, length: int | None = None, std: float | None = None):
    model = ctx.model
    N = length or ctx.samples()
    std = ctx.noise_std if std is None else std
    u = gaussian_input(N, model.p, seed=ctx.seed)
    noise = NoiseModel.isotropic(model.n, model.m, std, std) if std > 0 else None
    x0 = ctx.rng.standard_normal(model.n)
    return simulate(model, u, x0=x0, noise=noise, seed=ctx.seed + 1)


def check_kernel_dynamics(ctx: SuiteContext) -> CheckResult:
    """r_K = K₂·r̄_s con r̄ el residuo del simulador en lazo abierto (L = 0)."""
    model, s = ctx.model, ctx.s
    kernel = kernel_rep(model, s)
    traj = _noisy_trajectory(ctx)
    rbar = observer_residual(model, np.zeros((model.n, model.m)), traj)
    windows = build_data_matrix(traj, s, check_width=False).T
    residual = linalg.norm(kernel.K_Gs @ windows - kernel.K2 @ build_hankel(rbar, s).data, 2)
    scale = linalg.norm(kernel.K_Gs, 2) * linalg.norm(windows, 2)
    return _result("kernel-dynamics", _rel(residual, scale), settings.IDENTITY_TOL)


def check_parity_equivalence(ctx: SuiteContext) -> CheckResult:
    kernel = kernel_rep(ctx.model, ctx.s)
    parity = baseline_parity(ctx.model, ctx.s)
    gap = gap_metric(column_basis(kernel.K_Gs.T), column_basis(parity.residual_map.T))
    return _result("parity-equivalence", gap, settings.IDENTITY_TOL)


def check_subspace_intersection(ctx: SuiteContext) -> CheckResult:
    F, L = ctx.random_gains()
    I_G = image_rep(ctx.model, F, ctx.s).stacked
    I_C = controller_image_rep(ctx.model, F, L, ctx.s).stacked
    joint = numerical_rank(np.hstack([I_G, I_C]))
    separate = numerical_rank(I_G) + numerical_rank(I_C)
    return CheckResult(
        "subspace-intersection", "pass" if joint < separate else "fail",
        float(separate - joint), None, f"rank conjunto {joint} < {separate}",
    )


def check_residual_parameterization(ctx: SuiteContext) -> CheckResult:
    kernel = kernel_rep(ctx.model, ctx.s)
    _, L = ctx.random_gains()
    I_C = controller_image_rep(ctx.model, None, L, ctx.s).stacked
    phi = max(1, kernel.theta - 1)
    R = ctx.rng.standard_normal((phi, kernel.theta))
    rank = numerical_rank(R @ kernel.K_Gs @ I_C)
    return CheckResult(
        "residual-parameterization", "pass" if rank == phi else "fail", float(rank), float(phi)
    )


def check_fundamental_lemma(ctx: SuiteContext) -> CheckResult:
    traj = _noisy_trajectory(ctx, std=0.0)
    T = build_data_matrix(traj, ctx.s, check_width=False)
    report = fundamental_lemma_check(T, ctx.model, seed=ctx.seed)
    value = max(report.gap, report.max_member_residual)
    return CheckResult(
        "fundamental-lemma", "pass" if report.holds else "fail", value, report.rel_tol,
        f"rank(T) = {report.data_rank}, rank(I_G) = {report.image_rank}",
    )


def check_noisy_full_rank(ctx: SuiteContext) -> CheckResult:
    traj = _noisy_trajectory(ctx, std=max(ctx.noise_std, 1e-3))
    T = build_data_matrix(traj, ctx.s, check_width=False)
    rank = numerical_rank(T.T)
    return CheckResult("noisy-full-rank", "pass" if rank == T.rows else "fail", float(rank), float(T.rows))


def _latent_setup(ctx: SuiteContext, std: float):
    model, s = ctx.model, ctx.s
    F = deadbeat_gain(model, seed=ctx.seed)
    L = kalman_gain(model, NoiseModel.isotropic(model.n, model.m, 1.0, 1.0)).L
    traj = _noisy_trajectory(ctx, std=std)
    v, r = latent_signals(model, F, L, traj)
    Hv, Hr = latent_hankels(v, r, s, model.n)
    return F, L, traj, Hv, Hr


def check_latent_reconstruction(ctx: SuiteContext) -> CheckResult:
    model, s = ctx.model, ctx.s
    F, L, traj, Hv, Hr = _latent_setup(ctx, ctx.noise_std)
    data = build_data_matrix(align_data(traj, model.n), s, check_width=False).T
    rebuilt = psi_stack(model, F, L, s).Psi_s @ np.vstack([Hv.data, Hr.data])
    residual = linalg.norm(data - rebuilt, 2)
    return _result("latent-reconstruction", _rel(residual, linalg.norm(data, 2)), settings.IDENTITY_TOL)


def check_davis_kahan(ctx: SuiteContext) -> CheckResult:
    F, L, _, Hv, Hr = _latent_setup(ctx, min(ctx.noise_std, 1e-2))
    report = davis_kahan_oracle_bound(ctx.model, F, L, Hv, Hr, strict=False)
    if not report.applicable:
        return CheckResult("davis-kahan", "n/a", report.gap, report.bound, "cota >= 1")
    return CheckResult(
        "davis-kahan", "pass" if report.holds else "fail", report.gap, report.bound,
        f"gap {report.gap:.3e} <= cota {report.bound:.3e}",
    )


CHECKS: tuple[tuple[str, Callable[[SuiteContext], CheckResult], bool], ...] = (
    ("rank-law", check_rank_law, False),
    ("image-reparameterization", check_image_reparameterization, False),
    ("controller-reparameterization", check_controller_reparameterization, False),
    ("psi-factorization", check_psi_factorization, False),
    ("psi-rank", check_psi_rank, False),
    ("kernel-certificates", check_kernel_certificates, True),
    ("kernel-dynamics", check_kernel_dynamics, True),
    ("parity-equivalence", check_parity_equivalence, True),
    ("subspace-intersection", check_subspace_intersection, True),
    ("residual-parameterization", check_residual_parameterization, True),
    ("fundamental-lemma", check_fundamental_lemma, False),
    ("noisy-full-rank", check_noisy_full_rank, False),
    ("latent-reconstruction", check_latent_reconstruction, False),
    ("davis-kahan", check_davis_kahan, False),
)

LABELS: tuple[str, ...] = tuple(label for label, _, _ in CHECKS)


def run_suite(
    model: StateSpaceModel, s: int, seed: int = 0, noise_std: float = 0.1
) -> list[CheckResult]:
    """
    Ejecuta todos los chequeos sobre (model, s).

    Args:
        model: Planta mínima
        s: Profundidad de ventana
        seed: Semilla de ganancias aleatorias y simulaciones
        noise_std: Desviación estándar del ruido en los chequeos con ruido

    Returns:
        Lista de CheckResult en el orden de LABELS
    """
    ctx = SuiteContext(model=model, s=s, seed=seed, noise_std=noise_std)
    results = []
    for label, check, needs_residual in CHECKS:
        if needs_residual and not ctx.has_residual:
            results.append(CheckResult(label, "n/a", detail=f"s = {s} <= μ_obs"))
            continue
        try:
            result = check(ctx)
        except (FsfdError, np.linalg.LinAlgError, ValueError, ArithmeticError) as e:
            logger.warning("Chequeo %s abortado: %s: %s", label, type(e).__name__, e)
            result = CheckResult(label, "fail", detail=f"{type(e).__name__}: {e}")
        logger.debug("%s: %s (%s)", label, result.status, result.value)
        results.append(result)
    return results


def failed_labels(results: list[CheckResult]) -> list[str]:
    return [result.label for result in results if result.status == "fail"]
