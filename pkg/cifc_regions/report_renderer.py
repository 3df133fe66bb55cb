"""Text rendering of reports, regions and simulation tables using Jinja2."""

import logging
import os
from typing import Any, List, Optional, Sequence, Tuple, Union

from jinja2 import Environment, FileSystemLoader

from .models import ConditionReport, RatePolytope, RegionUnion, SimResult

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 6


def significant(value: Any) -> str:
    """Format a number with six significant digits; other values pass through."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return f"{value:#.{SIGNIFICANT_DIGITS}g}"


def _tag(value: Any) -> str:
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(significant(float(v)) for v in value) + ")"
    return "-" if value is None else str(value)


class ReportRenderer:
    """Renders command results as plain text.

    Attributes:
        env (Environment): The Jinja2 environment holding the report templates.
    """

    def __init__(self, template_root: Optional[str] = None):
        """Initialize the renderer.

        Args:
            template_root (str, optional): Directory of ``*.j2`` templates. Defaults
                to the ``templates`` directory next to this file.
        """
        root = template_root or os.path.join(os.path.dirname(__file__), "templates")
        self.env = Environment(
            loader=FileSystemLoader(root),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )
        self.env.filters["sig"] = significant
        self.env.filters["tag"] = _tag
        logger.debug(f"Report templates loaded from {root}")

    def render_condition(self, report: ConditionReport) -> str:
        """Render a condition verdict with one line per clause."""
        return self.env.get_template("condition_report.j2").render(report=report)

    def render_regions(
        self,
        regions: Sequence[Tuple[Union[int, str, None], RatePolytope, List[Tuple[float, float, float]]]],
    ) -> str:
        """Render constraints and vertices of one or more regions.

        Args:
            regions: (tag, polytope, vertices) triples; the tag is the policy
                index or None for a single region.
        """
        return self.env.get_template("region.j2").render(regions=regions)

    def render_union(self, union: RegionUnion, slice_mode: bool = False) -> str:
        return self.env.get_template("union.j2").render(union=union, slice_mode=slice_mode)

    def render_simulation(self, results: Sequence[SimResult]) -> str:
        return self.env.get_template("simulation.j2").render(results=results)
