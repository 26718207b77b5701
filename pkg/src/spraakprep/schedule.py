"""Learning-rate schedules and batch-size arithmetic, as pure functions.

Three schedule shapes cover pre-training and fine-tuning:

* triangular: linear from peak/100 up to the peak, linear back down;
* two-stage: linear warmup over the first 10 % of steps from peak/1000,
  then cosine annealing down to peak/100;
* tri-stage: linear warmup to a hold value, a constant hold phase, then
  exponential decay to a final value.

Batch sizes are expressed in tokens, one token being one audio sample,
so a 5-minute batch at 16 kHz is 4.8 M tokens. Scaling the learning
rate to a different batch size follows the square-root rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import UsageError


def _check_step(step: int, total: int) -> None:
    if not 0 <= step <= total:
        raise ValueError(f"step {step} outside [0, {total}]")


@dataclass(frozen=True)
class TriangularSchedule:
    peak_lr: float
    steps_up: int
    steps_down: int
    min_ratio: float = 0.01

    def __post_init__(self):
        if self.peak_lr <= 0 or self.steps_up <= 0 or self.steps_down <= 0:
            raise UsageError("triangular schedule needs positive peak and step counts")

    @property
    def total_steps(self) -> int:
        return self.steps_up + self.steps_down

    def lr_at(self, step: int) -> float:
        _check_step(step, self.total_steps)
        min_lr = self.peak_lr * self.min_ratio
        if step <= self.steps_up:
            return min_lr + (self.peak_lr - min_lr) * (step / self.steps_up)
        return min_lr + (self.peak_lr - min_lr) * ((self.total_steps - step) / self.steps_down)


@dataclass(frozen=True)
class TwoStageSchedule:
    peak_lr: float
    total_steps: int
    warmup_fraction: float = 0.10
    init_ratio: float = 1e-3
    final_ratio: float = 1e-2

    def __post_init__(self):
        if self.peak_lr <= 0 or self.total_steps <= 0:
            raise UsageError("two-stage schedule needs positive peak and total steps")
        if not 0.0 < self.warmup_fraction < 1.0:
            raise UsageError("warmup_fraction must lie in (0, 1)")

    @property
    def warmup_steps(self) -> int:
        return max(1, round(self.warmup_fraction * self.total_steps))

    def lr_at(self, step: int) -> float:
        _check_step(step, self.total_steps)
        init_lr = self.peak_lr * self.init_ratio
        final_lr = self.peak_lr * self.final_ratio
        w = self.warmup_steps
        if step <= w:
            return init_lr + (self.peak_lr - init_lr) * (step / w)
        t = (step - w) / (self.total_steps - w)
        return final_lr + (self.peak_lr - final_lr) * 0.5 * (1.0 + math.cos(math.pi * t))


@dataclass(frozen=True)
class TriStageSchedule:
    total_steps: int
    init_lr: float = 5e-7
    hold_lr: float = 5e-5
    final_lr: float = 2.5e-6
    # Phase proportions are a configurable default, not dictated by the
    # schedule definition itself.
    phase_fractions: tuple[float, float, float] = (0.10, 0.40, 0.50)

    def __post_init__(self):
        if min(self.init_lr, self.hold_lr, self.final_lr) <= 0 or self.total_steps <= 0:
            raise UsageError("tri-stage schedule needs positive LRs and total steps")
        if abs(sum(self.phase_fractions) - 1.0) > 1e-9:
            raise UsageError("tri-stage phase fractions must sum to 1")

    @property
    def warmup_steps(self) -> int:
        return max(1, round(self.phase_fractions[0] * self.total_steps))

    @property
    def hold_end(self) -> int:
        return round((self.phase_fractions[0] + self.phase_fractions[1]) * self.total_steps)

    def lr_at(self, step: int) -> float:
        _check_step(step, self.total_steps)
        w = self.warmup_steps
        if step <= w:
            return self.init_lr + (self.hold_lr - self.init_lr) * (step / w)
        if step <= self.hold_end:
            return self.hold_lr
        t = (step - self.hold_end) / (self.total_steps - self.hold_end)
        return self.hold_lr * (self.final_lr / self.hold_lr) ** t


Schedule = TriangularSchedule | TwoStageSchedule | TriStageSchedule

KINDS = ("triangular", "two-stage", "tri-stage")


def lr_at(config: Schedule, step: int) -> float:
    """Learning rate at an integer step of the given schedule."""
    return config.lr_at(step)


def sqrt_scale(reference_lr: float, reference_tokens: int, new_tokens: int) -> float:
    """Square-root batch scaling of a learning rate."""
    if reference_lr <= 0 or reference_tokens <= 0 or new_tokens <= 0:
        raise ValueError("sqrt_scale needs positive lr and token counts")
    return reference_lr * math.sqrt(new_tokens / reference_tokens)


def tokens_of(duration_minutes: float, sample_rate: int) -> int:
    """Token count of a batch duration (one token per audio sample)."""
    if duration_minutes <= 0 or sample_rate <= 0:
        raise ValueError("tokens_of needs positive inputs")
    return round(duration_minutes * 60.0 * sample_rate)


def seconds_of(token_count: int, sample_rate: int) -> float:
    """Inverse of tokens_of, in seconds."""
    if token_count <= 0 or sample_rate <= 0:
        raise ValueError("seconds_of needs positive inputs")
    return token_count / sample_rate


@dataclass(frozen=True)
class BatchScale:
    """A target batch size tied to the reference point it scales from."""

    tokens_per_batch: int
    reference_lr: float
    reference_tokens: int

    def scaled_lr(self) -> float:
        return sqrt_scale(self.reference_lr, self.reference_tokens, self.tokens_per_batch)


def iter_table(config: Schedule, stride: int = 1):
    """(step, lr) pairs over the whole schedule; the last step is always
    included so the endpoint is visible in exported tables."""
    if stride <= 0:
        raise ValueError("stride must be positive")
    total = config.total_steps
    for step in range(0, total + 1, stride):
        yield step, config.lr_at(step)
    if total % stride != 0:
        yield total, config.lr_at(total)


def export_table(path, config: Schedule, stride: int = 1, header_lines=()) -> int:
    """Write a two-column (step, lr) text table; returns row count."""
    import os

    tmp = str(path) + ".tmp"
    rows = 0
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write(f"# {config!r}\n")
            fh.write("# step lr\n")
            for step, lr in iter_table(config, stride):
                fh.write(f"{step} {lr:.12e}\n")
                rows += 1
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return rows


def make_schedule(kind: str, **kwargs) -> Schedule:
    """Construct a schedule from CLI-ish keyword arguments."""
    if kind == "triangular":
        return TriangularSchedule(
            peak_lr=kwargs["peak_lr"],
            steps_up=kwargs["steps_up"],
            steps_down=kwargs["steps_down"],
            min_ratio=kwargs.get("min_ratio", 0.01),
        )
    if kind == "two-stage":
        return TwoStageSchedule(
            peak_lr=kwargs["peak_lr"],
            total_steps=kwargs["total_steps"],
            warmup_fraction=kwargs.get("warmup_fraction", 0.10),
            init_ratio=kwargs.get("init_ratio", 1e-3),
            final_ratio=kwargs.get("final_ratio", 1e-2),
        )
    if kind == "tri-stage":
        return TriStageSchedule(
            total_steps=kwargs["total_steps"],
            init_lr=kwargs.get("init_lr", 5e-7),
            hold_lr=kwargs.get("hold_lr", 5e-5),
            final_lr=kwargs.get("final_lr", 2.5e-6),
            phase_fractions=tuple(kwargs.get("phase_fractions", (0.10, 0.40, 0.50))),
        )
    raise UsageError(f"unknown schedule kind {kind!r} (choose from {KINDS})")
