"""Perfil de rangos de la representación imagen para una profundidad s."""

from dataclasses import dataclass

from src.ltisim.models import StateSpaceModel
from src.ltisim.structure import observability_index, observability_matrix
from src.representations.image import image_rep
from src.sigkit.rank import numerical_rank


@dataclass(frozen=True)
class RankProfile:
    s: int
    rank_IGs: int           # rank(I_{G,s}) = sp + β
    beta: int               # rank(O_s)
    gamma: int              # dimensión del subespacio imagen
    theta: int              # sm − β, dimensión del kernel
    dim_residual: int       # s(p+m) − rank(I_{G,s})
    observability_index: int
    rank_condition_holds: bool  # rank(I_{G,s}) < s(p+m), equivalente a sm > β

    @property
    def residual_exists(self) -> bool:
        return self.s > self.observability_index


def rank_profile(model: StateSpaceModel, s: int) -> RankProfile:
    """Reporta rank(I_{G,s}), β = rank(O_s) y las dimensiones imagen/residual."""
    p, m = model.p, model.m
    beta = numerical_rank(observability_matrix(model, s))
    rank_IGs = numerical_rank(image_rep(model, None, s).stacked)
    return RankProfile(
        s=s,
        rank_IGs=rank_IGs,
        beta=beta,
        gamma=rank_IGs,
        theta=s * m - beta,
        dim_residual=s * (p + m) - rank_IGs,
        observability_index=observability_index(model),
        rank_condition_holds=rank_IGs < s * (p + m),
    )
