from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every module.

    norm: normalisation of amplitude and probability vectors.
    amp: smallest amplitude treated as nonzero.
    maj: slack on majorization partial sums and on tie detection.
    psd: eigenvalue slack for density matrices.
    prob: negative probabilities above ``-prob`` are clamped to zero.
    res: accepted residual of the probability linear system.
    comp: accepted deviation of sum K^dag K from the identity.
    """

    norm: float = 1e-10
    amp: float = 1e-12
    maj: float = 1e-12
    psd: float = 1e-9
    prob: float = 1e-10
    res: float = 1e-9
    comp: float = 1e-10

    def updated(self, **overrides):
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT_TOL = Tolerances()
