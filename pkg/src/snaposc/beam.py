"""Restoring-force curve of the bistable beam, branch by branch.

Only the endpoints of each equilibrium branch are measurable: zero force
at the stable point and the critical force, with zero slope, at the fold.
The curve between them is a monotone cubic Hermite segment with zero end
slopes (a smoothstep).  Event timing in the quasi-static model depends
only on the endpoint triple, so the interpolant fixes the displacement
waveform, not the period.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import BeamCharacteristics
from .errors import InvalidCharacteristics, OutOfBranch


@dataclass(frozen=True)
class _BranchSegment:
    """One branch in canonical (pulling-actuator frame) coordinates.

    The domain runs from the stable point ``v0`` to the fold ``v1``; the
    branch is traversed with v increasing.
    """

    v0: float
    v1: float
    f_crit: float

    def force(self, v: float) -> float:
        u = (v - self.v0) / (self.v1 - self.v0)
        return self.f_crit * u * u * (3.0 - 2.0 * u)

    def slope(self, v: float) -> float:
        u = (v - self.v0) / (self.v1 - self.v0)
        return self.f_crit * 6.0 * u * (1.0 - u) / (self.v1 - self.v0)


@dataclass(frozen=True)
class BeamCurve:
    """Evaluatable force-displacement curve for both branches.

    Branch 1 lives on ``[w_rise, w_snap_thru]``, branch 2 on
    ``[w_snap_back, -w_rise]``; branch 2 is stored mirrored so both share
    the same canonical segment math (for mirror-symmetric characteristics
    branch 2 is exactly the odd reflection of branch 1).
    """

    branch_1: _BranchSegment
    branch_2: _BranchSegment

    def _segment(self, branch: int) -> _BranchSegment:
        if branch == 1:
            return self.branch_1
        if branch == 2:
            return self.branch_2
        raise ValueError(f"branch must be 1 or 2, got {branch!r}")

    def canonical(self, branch: int, w: float) -> float:
        """Map a signed beam displacement to the branch's canonical frame."""
        return w if branch == 1 else -w

    def domain(self, branch: int) -> tuple[float, float]:
        """Signed displacement interval of the branch, low to high."""
        seg = self._segment(branch)
        if branch == 1:
            return seg.v0, seg.v1
        return -seg.v1, -seg.v0


def build_beam_curve(beam: BeamCharacteristics) -> BeamCurve:
    """Construct the two-branch curve from the critical characteristics."""
    segments = []
    for direction in ("thru", "back"):
        w_start, w_crit, f_crit = beam.stroke(direction)
        if not w_start < w_crit:
            raise InvalidCharacteristics(
                f"degenerate {direction} branch: stable point {w_start} must "
                f"precede the fold {w_crit} in the pulling frame")
        segments.append(_BranchSegment(v0=w_start, v1=w_crit, f_crit=f_crit))
    return BeamCurve(branch_1=segments[0], branch_2=segments[1])


def beam_restoring_force(curve: BeamCurve, branch: int, w: float) -> float:
    """Force with which the beam resists departure from the branch's stable
    point, at signed displacement ``w``.  Zero at the stable point, rising
    monotonically to the critical force at the fold."""
    seg = curve._segment(branch)
    v = curve.canonical(branch, w)
    # Tolerate float round-off at the branch endpoints.
    span = seg.v1 - seg.v0
    slack = 1e-12 * max(abs(seg.v0), abs(seg.v1), span)
    if v > seg.v1 + slack:
        raise OutOfBranch(
            f"displacement {w} mm lies beyond the branch-{branch} fold")
    if v < seg.v0 - slack:
        raise OutOfBranch(
            f"displacement {w} mm lies beyond the branch-{branch} stable point")
    return seg.force(min(max(v, seg.v0), seg.v1))
