"""Small shared helpers for the test modules."""

from wscan.parser import parse_clause_set


def cs(body: str, header: str = "vars: X/1"):
    """Clause set from ``clause:`` lines given one per line without the keyword."""
    lines = [header] + [f"clause: {l.strip()}" for l in body.strip().splitlines() if l.strip()]
    return parse_clause_set("\n".join(lines) + "\n")


def example1():
    return cs(
        """
        B(a,v)
        X(a)
        B(u,v) | -X(u) | X(v)
        -X(c)
        """
    )


def clause(text: str, header: str = "vars: X/1, Y/2"):
    return cs(text, header).get(1)
