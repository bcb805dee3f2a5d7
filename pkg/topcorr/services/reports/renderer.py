"""Module to render command reports to Markdown, HTML and CSV."""

from __future__ import annotations

import html
import logging
from functools import lru_cache
from typing import TYPE_CHECKING, Any

import markdown
import pandas as pd
from jinja2 import (
    Environment,
    FileSystemLoader,
    TemplateNotFound,
    select_autoescape,
)

from topcorr.services.reports.registry import REPORT_REGISTRY, TEMPLATES_DIR

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping
    from pathlib import Path

_MARKDOWN_EXTENSIONS = ("tables", "fenced_code")

_PAGE = (
    "<!doctype html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
    "<title>{title}</title>\n<style>{css}</style>\n</head>\n"
    "<body>\n{body}\n</body>\n</html>\n"
)

_HTML_CSS = """
body { font-family: sans-serif; max-width: 60rem; margin: 2rem auto; }
table { border-collapse: collapse; }
th, td { border: 1px solid #999; padding: 0.2rem 0.6rem; }
code { background: #f3f3f3; }
"""

_LOGGER = logging.getLogger(__name__)


def _fmt_residual(value: float) -> str:
    return f"{value:.3e}"


def _fmt_complex(value: complex | float | list[float]) -> str:
    z = complex(*value) if isinstance(value, list | tuple) else complex(value)
    if z.imag == 0:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}j"


@lru_cache(maxsize=1)
def _env() -> Environment:
    """Report environment with the number filters; Markdown is not escaped."""
    env = Environment(
        loader=FileSystemLoader(TEMPLATES_DIR),
        autoescape=select_autoescape(default=False, default_for_string=False),
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
    )
    env.filters.update(residual=_fmt_residual, cplx=_fmt_complex)
    return env


def render_report_md(command: str, report: Mapping[str, Any]) -> str:
    """
    Render the Markdown report of one command.

    :param command: Command name, a key of the registry.
    :type command: str
    :param report: The JSON report of the command.
    :type report: Mapping[str, Any]
    :raises KeyError: If the command has no template.
    :return: The Markdown text.
    :rtype: str
    """
    cfg = REPORT_REGISTRY[command]
    try:
        template = _env().get_template(cfg["template"])
    except TemplateNotFound:
        _LOGGER.exception("Missing template %s", cfg["template"])
        raise
    return template.render(title=cfg["title"], report=report)


def render_markdown_to_html(
    md_text: str,
    title: str = "topcorr report",
) -> str:
    """
    Render Markdown text to a standalone HTML page.

    :param md_text: The Markdown text.
    :type md_text: str
    :param title: Page title.
    :type title: str
    :return: The HTML document.
    :rtype: str
    """
    body = markdown.markdown(md_text, extensions=list(_MARKDOWN_EXTENSIONS))
    return _PAGE.format(title=html.escape(title), css=_HTML_CSS, body=body)


def save_residuals_csv(
    rows: Iterable[Mapping[str, Any]],
    path: str | Path,
) -> int:
    """
    Write per-sample residuals as CSV.

    :param rows: One mapping per sample.
    :type rows: Iterable[Mapping[str, Any]]
    :param path: Output file.
    :type path: str | Path
    :return: Number of rows written.
    :rtype: int
    """
    frame = pd.DataFrame(list(rows))
    frame.to_csv(path, index=False)
    _LOGGER.info("wrote %d residual rows to %s", len(frame), path)
    return len(frame)
