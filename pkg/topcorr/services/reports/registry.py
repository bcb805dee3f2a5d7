"""Module for the report template registry."""
from pathlib import Path

TEMPLATES_DIR = Path(__file__).resolve().parent / "templates"

REPORT_REGISTRY = {
    "validate": {
        "title": "Graph validation",
        "template": "validate.md.j2",
    },
    "characters": {
        "title": "Characters over a base point",
        "template": "characters.md.j2",
    },
    "nestrep": {
        "title": "Nest representations",
        "template": "nestrep.md.j2",
    },
    "fock": {
        "title": "Truncated Fock representation",
        "template": "fock.md.j2",
    },
    "conjugacy": {
        "title": "Local conjugacy",
        "template": "conjugacy.md.j2",
    },
    "cover": {
        "title": "Admissible cover",
        "template": "cover.md.j2",
    },
    "equivalence": {
        "title": "Unitary equivalence",
        "template": "equivalence.md.j2",
    },
    "fixtures": {
        "title": "Fixture corpus",
        "template": "fixtures.md.j2",
    },
}
