from dataclasses import asdict, dataclass, fields


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for one-shot training and stylization.

    ``lam`` is the mutual-information weight (``lambda`` is reserved).
    """

    alpha: float = 1.0
    lam: float = 0.01
    mu: float = 1e-5
    k: int = 10
    learning_rate: float = 1e-3
    max_iters: int = 5000
    patience: int = 200
    min_rel_improvement: float = 1e-4
    train_max_side: int = 256
    eps_wct: float = 1e-5
    seed: int = 0
    renormalize_wct: bool = False

    def __post_init__(self):
        for name in ("alpha", "lam", "mu"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.eps_wct <= 0:
            raise ValueError("eps_wct must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iters < 1 or self.patience < 1 or self.train_max_side < 1:
            raise ValueError("max_iters, patience and train_max_side must be >= 1")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})
