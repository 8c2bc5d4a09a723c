"""
Main module for computing dihedral, cyclic and reflexive homology of involutive A-infinity algebras
"""
import os
import sys
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Any
from dotenv import load_dotenv, find_dotenv

# Load environment variables
load_dotenv(find_dotenv())

# Add the backend directory to the path so the helper package resolves
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from helper.errors import (DihedralError, MissingHuStructure, MissingPartner, MissingReflection, MissingTau,
                           NonExactNode, NotADifferential, NotAField, NotIntegerRing, ParseError,
                           SemanticError, StructureInvalid, WindowExceeded)
from helper.exact_linalg import RingSpec
from helper.ainfinity import (AInfAlgebraDesc, HuStructureDesc, validate_ainf, validate_hu, validate_involution,
                              validate_involutive_hu)
from helper.algebra_parser import parse_algebra
from helper.complexes import ComplexSuite
from helper.homology import (cyclic_homology, dihedral_homology, quotient_cross_check, reflexive_homology,
                             verify_les)
from helper.reports import ValidationReport, render_human, write_structured
from helper.simplicial import validate_f_module
from helper.symmetry import validate_barred, validate_df_relations, validate_interchange
from helper.tensor_construction import validate_contracting

# Configure logging
logging.basicConfig(
    level=os.getenv("DIHEDRAL_LOG_LEVEL", "INFO").upper(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

TASKS = ("validate", "cyclic", "dihedral", "reflexive", "quotients", "les")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _env_int(name: str, default: str) -> int:
    raw = os.getenv(name, default)
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got '{raw}'")


def _parse_rho(raw: str, source: str) -> int:
    if raw.strip() not in ("+1", "1", "-1"):
        raise ValueError(f"{source} must be +1 or -1, got '{raw}'")
    return -1 if raw.strip() == "-1" else 1


@dataclass
class JobConfig:
    """One batch run: input file, coefficient ring, rho, truncation degree and tasks"""

    input: str
    ring: Optional[RingSpec] = None
    rho: Optional[int] = None
    n_max: int = 4
    tasks: List[str] = field(default_factory=lambda: ["validate"])
    out_dir: str = "reports"
    workers: int = 1
    output_format: str = "human"
    dump_complexes: bool = False
    truncation: int = 3

    @classmethod
    def from_env(cls, input: str, **overrides) -> "JobConfig":
        """
        Settings from DIHEDRAL_* environment variables; explicit overrides (CLI flags) win

        Raises:
            ValueError naming the variable when a value is invalid
        """
        values: Dict[str, Any] = {
            "ring": RingSpec.parse(os.environ["DIHEDRAL_RING"]) if os.getenv("DIHEDRAL_RING") else None,
            "rho": _parse_rho(os.environ["DIHEDRAL_RHO"], "DIHEDRAL_RHO") if os.getenv("DIHEDRAL_RHO") else None,
            "n_max": _env_int("DIHEDRAL_NMAX", "4"),
            "workers": _env_int("DIHEDRAL_WORKERS", "1"),
            "out_dir": os.getenv("DIHEDRAL_OUT_DIR", "reports"),
            "truncation": _env_int("DIHEDRAL_TRUNCATION", "3"),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        config = cls(input=input, **values)
        config.check()
        return config

    def check(self) -> None:
        unknown = [t for t in self.tasks if t not in TASKS]
        if unknown:
            raise ValueError(f"Unknown tasks {unknown}; choose from {list(TASKS)}")
        if self.rho is not None and self.rho not in (1, -1):
            raise ValueError(f"rho must be +1 or -1, got {self.rho}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be at least 1, got {self.n_max}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.output_format not in ("human", "structured"):
            raise ValueError(f"Unknown output format '{self.output_format}'")


def exit_status_for(error: Exception) -> int:
    """Exit code for an exception: 1 verification failure, 2 input error, 3 internal assertion"""
    if isinstance(error, NonExactNode):
        return EXIT_VALIDATION
    if isinstance(error, (NotADifferential, StructureInvalid)):
        return EXIT_INTERNAL
    if isinstance(error, (ParseError, SemanticError, MissingHuStructure, MissingReflection, MissingTau,
                          MissingPartner, NotAField, NotIntegerRing, WindowExceeded, FileNotFoundError)):
        return EXIT_INPUT
    if isinstance(error, DihedralError):
        return EXIT_INTERNAL
    if isinstance(error, ValueError):
        return EXIT_INPUT
    return EXIT_INTERNAL


class DihedralHomologyEngine:
    """Main engine: loads one algebra description and runs the requested tasks on it"""

    def __init__(self, config: JobConfig):
        """Initialize the engine and parse the input description"""
        self.config = config
        self.logger = logger
        self.algebra: Optional[AInfAlgebraDesc] = None
        self.hu: Optional[HuStructureDesc] = None
        self._suite: Optional[ComplexSuite] = None
        self._load()

    def _load(self):
        try:
            a, h = parse_algebra(self.config.input, ring=self.config.ring, truncation=self.config.truncation)
            self.algebra = a.with_rho(self.config.rho) if self.config.rho is not None else a
            self.hu = h
            self.logger.info(f"Loaded {self.config.input} over {self.algebra.ring.label} (rho={self.rho:+d})")
        except Exception as e:
            self.logger.error(f"Failed to load {self.config.input}: {str(e)}")
            raise

    @property
    def rho(self) -> int:
        return self.algebra.rho

    @property
    def suite(self) -> ComplexSuite:
        if self._suite is None:
            self._suite = ComplexSuite(self.algebra, self.config.n_max, self.hu)
        return self._suite

    def validate(self) -> List[ValidationReport]:
        """
        Run every relation validator that applies to the input

        Returns:
            List of ValidationReport, algebra-level first, then the tensor module and its operators
        """
        a, h = self.algebra, self.hu
        reports = [validate_ainf(a)]
        if a.involution is not None:
            reports.append(validate_involution(a))
        if h is not None:
            reports.append(validate_hu(a, h))
            if a.involution is not None:
                reports.append(validate_involutive_hu(a, h))
        if not all(r.passed for r in reports):
            return reports
        suite = self.suite
        reports.append(validate_f_module(suite.faces))
        reports.append(suite.d0.relation_report())
        reports.append(suite.d1.relation_report())
        reports.append(validate_df_relations(suite.faces, suite.bundle.structure))
        reports.append(validate_interchange(suite.operators, suite.d0, suite.d1))
        reports.append(validate_barred(suite.barred_ops, suite.b, suite.bprime))
        if h is not None:
            reports.append(validate_contracting(suite.bundle, suite.s_maps(), suite.d1))
        return reports

    def cyclic(self) -> Dict[str, Any]:
        return cyclic_homology(self.algebra, self.config.n_max, workers=self.config.workers,
                               suite=self.suite).to_dict()

    def dihedral(self) -> Dict[str, Any]:
        return dihedral_homology(self.algebra, self.rho, self.config.n_max, workers=self.config.workers,
                                 suite=self.suite).to_dict()

    def reflexive(self) -> Dict[str, Any]:
        return reflexive_homology(self.algebra, self.rho, self.config.n_max, workers=self.config.workers,
                                  suite=self.suite).to_dict()

    def quotients(self) -> Dict[str, Any]:
        return quotient_cross_check(self.suite, workers=self.config.workers)

    def les(self) -> Dict[str, Any]:
        if self.hu is None:
            raise MissingHuStructure("The les task needs tau data (a homotopy-unit block) in the input")
        report = verify_les(self.algebra, self.hu, self.rho, self.config.n_max,
                            workers=self.config.workers, suite=self.suite)
        report.raise_if_not_exact()
        return report.to_dict()

    def dump_complexes(self) -> List[str]:
        """Write a matrix-market dump of every assembled total complex"""
        suite = self.suite
        complexes = [suite.cyclic().total()]
        if suite.barred_ops.has_reflection:
            complexes += [suite.dihedral().total(), suite.reflexive().total()]
        paths = []
        os.makedirs(self.config.out_dir, exist_ok=True)
        for c in complexes:
            safe = "".join(ch if ch.isalnum() else "_" for ch in c.name).strip("_")
            path = os.path.join(self.config.out_dir, f"{safe}.mtx")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(c.to_matrix_market())
            paths.append(path)
        self.logger.info(f"Wrote {len(paths)} complex dumps to {self.config.out_dir}")
        return paths

    def run(self) -> Dict[str, Any]:
        """
        Execute the requested tasks in dependency order and write the reports

        Returns:
            Result dictionary with "exit_status", "success" and per-task sections
        """
        config = self.config
        result: Dict[str, Any] = {
            "input": config.input,
            "ring": self.algebra.ring.label,
            "rho": f"{self.rho:+d}",
            "n_max": config.n_max,
            "tasks": [t for t in TASKS if t in config.tasks],
            "structure_maps_consumed": f"pi_0..pi_{config.n_max - 1}",
            "homology": {},
        }
        status = EXIT_OK
        try:
            if "validate" in config.tasks:
                reports = self.validate()
                result["validation"] = [r.to_dict() for r in reports]
                if not all(r.passed for r in reports):
                    self.logger.warning("Validation failed; downstream tasks skipped")
                    status = EXIT_VALIDATION
            if status == EXIT_OK:
                for task in ("cyclic", "dihedral", "reflexive"):
                    if task in config.tasks:
                        result["homology"][task] = getattr(self, task)()
                if "quotients" in config.tasks:
                    result["quotients"] = self.quotients()
                if "les" in config.tasks:
                    result["les"] = self.les()
                if config.dump_complexes:
                    result["dumps"] = self.dump_complexes()
        except Exception as e:
            self.logger.error(f"Error while running {config.input}: {str(e)}")
            status = exit_status_for(e)
            result["error"] = str(e)
        result["exit_status"] = status
        result["success"] = status == EXIT_OK
        self.write_reports(result)
        return result

    def write_reports(self, result: Dict[str, Any]) -> None:
        os.makedirs(self.config.out_dir, exist_ok=True)
        write_structured(result, os.path.join(self.config.out_dir, "report.json"))
        with open(os.path.join(self.config.out_dir, "report.txt"), "w", encoding="utf-8") as fh:
            fh.write(render_human(result))


def main(argv: Optional[List[str]] = None) -> int:
    """Main function for command-line usage"""
    import argparse

    parser = argparse.ArgumentParser(description="Dihedral, cyclic and reflexive homology of involutive A-infinity algebras")
    parser.add_argument("--input", type=str, required=True, help="Algebra description file (.alg)")
    parser.add_argument("--ring", type=str, help="Coefficient ring: Q, Z or Fp:<p> (default: DIHEDRAL_RING or Q)")
    parser.add_argument("--rho", type=str, help="Sign of the reflection: +1 or -1 (default: DIHEDRAL_RHO or +1)")
    parser.add_argument("--nmax", type=int, help="Top simplicial degree (default: DIHEDRAL_NMAX or 4)")
    parser.add_argument("--tasks", type=str, default="validate",
                        help=f"Comma separated tasks from {','.join(TASKS)} (default: validate)")
    parser.add_argument("--out", type=str, help="Report directory (default: DIHEDRAL_OUT_DIR or reports)")
    parser.add_argument("--workers", type=int, help="Processes for per-degree homology (default: 1)")
    parser.add_argument("--format", type=str, default="human", choices=["human", "structured"],
                        help="Report printed to stdout (default: human)")
    parser.add_argument("--dump-complexes", action="store_true", help="Write matrix-market dumps of each Tot")

    args = parser.parse_args(argv)
    try:
        config = JobConfig.from_env(
            args.input,
            ring=RingSpec.parse(args.ring) if args.ring else None,
            rho=_parse_rho(args.rho, "--rho") if args.rho else None,
            n_max=args.nmax,
            tasks=[t.strip() for t in args.tasks.split(",") if t.strip()],
            out_dir=args.out,
            workers=args.workers,
            output_format=args.format,
            dump_complexes=args.dump_complexes,
        )
        engine = DihedralHomologyEngine(config)
        result = engine.run()
    except Exception as e:
        logger.error(f"Error in main: {str(e)}")
        result = {"success": False, "error": str(e), "exit_status": exit_status_for(e)}
        print(json.dumps(result, indent=2))
        return result["exit_status"]

    if config.output_format == "structured":
        print(json.dumps(result, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print(render_human(result), end="")
    return result["exit_status"]


if __name__ == "__main__":
    sys.exit(main())
