"""
Validation reports and run report writers
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


@dataclass
class ValidationFailure:
    relation: str
    location: str
    expected: str = ""
    actual: str = ""
    difference_nnz: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "relation": self.relation,
            "location": self.location,
            "expected": self.expected,
            "actual": self.actual,
            "difference_nnz": self.difference_nnz,
        }


@dataclass
class ValidationReport:
    """Outcome of one validator: how many relation instances ran and which failed"""

    name: str
    checks_run: int = 0
    failures: List[ValidationFailure] = field(default_factory=list)
    unsupported: List[str] = field(default_factory=list)
    untested: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, relation: str, location: str, expected: str = "", actual: str = "",
              difference_nnz: int = 0) -> bool:
        self.checks_run += 1
        if not ok:
            self.failures.append(ValidationFailure(relation, location, expected, actual, difference_nnz))
        return ok

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        self.checks_run += other.checks_run
        self.failures.extend(other.failures)
        self.unsupported.extend(other.unsupported)
        self.untested.extend(other.untested)
        return self

    def failing_locations(self, relation: Optional[str] = None) -> List[str]:
        return [f.location for f in self.failures if relation is None or f.relation == relation]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks_run": self.checks_run,
            "failures": [f.to_dict() for f in self.failures],
            "unsupported": list(self.unsupported),
            "untested": list(self.untested),
        }

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{self.name}: {status} ({self.checks_run} checks, {len(self.failures)} failures)"]
        for f in self.failures:
            lines.append(f"  {f.relation} at {f.location}: {f.difference_nnz} differing entries")
        for u in self.unsupported:
            lines.append(f"  unsupported: {u}")
        for u in self.untested:
            lines.append(f"  untested: {u}")
        return "\n".join(lines)

    def log_summary(self) -> None:
        if self.passed:
            logger.info(f"{self.name}: {self.checks_run} checks passed")
        else:
            logger.warning(f"{self.name}: {len(self.failures)} of {self.checks_run} checks failed")


def write_structured(result: Dict[str, Any], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(result, indent=2, sort_keys=True, ensure_ascii=False))
        fh.write("\n")


def render_human(result: Dict[str, Any]) -> str:
    """Line-oriented rendering of a run result"""
    lines = [f"input: {result.get('input')}",
             f"ring: {result.get('ring')}  rho: {result.get('rho')}  n_max: {result.get('n_max')}"]
    if "structure_maps_consumed" in result:
        lines.append(f"structure maps consumed: {result['structure_maps_consumed']}")
    for report in result.get("validation", []):
        status = "PASS" if report["passed"] else "FAIL"
        lines.append(f"[validate] {report['name']}: {status} ({report['checks_run']} checks)")
        for f in report["failures"]:
            lines.append(f"    {f['relation']} at {f['location']} ({f['difference_nnz']} entries)")
        for u in report["unsupported"]:
            lines.append(f"    unsupported: {u}")
    for name, hom in result.get("homology", {}).items():
        lo, hi = hom["window"]
        lines.append(f"[{name}] window {lo}..{hi}")
        for entry in hom["degrees"]:
            torsion = entry.get("torsion") or []
            extra = f" torsion {torsion}" if torsion else ""
            lines.append(f"    H_{entry['degree']} betti {entry['betti']}{extra}")
    les = result.get("les")
    if les:
        lines.append(f"[les] exact: {les['exact']}  alpha iso: {les['alpha_isomorphism']}  "
                     f"Q acyclic: {les['q_acyclic']}")
        for node in les["nodes"]:
            lines.append(f"    {node['node']} degree {node['degree']}: dim {node['dim']} "
                         f"in {node['rank_in']} out {node['rank_out']} exact {node['exact']}")
    if result.get("error"):
        lines.append(f"error: {result['error']}")
    lines.append(f"exit status: {result.get('exit_status')}")
    return "\n".join(lines) + "\n"
