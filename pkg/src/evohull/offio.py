"""Minimal OFF reader/writer for triangle data.

Floats are written with repr (shortest round-trip form) so identical inputs
always produce byte-identical files.
"""

from __future__ import annotations

from .errors import InvalidInputError


def off_text(vertices, faces) -> str:
    """OFF document for an indexed triangle list."""
    nv = len(vertices)
    nf = len(faces)
    ne = (3 * nf) // 2
    lines = ["OFF", f"{nv} {nf} {ne}"]
    for p in vertices:
        lines.append(" ".join(repr(float(c)) for c in p))
    for f in faces:
        lines.append("3 " + " ".join(str(int(i)) for i in f))
    return "\n".join(lines) + "\n"


def parse_off(text: str):
    """Parse an OFF document; returns (vertices, faces) as plain lists."""
    tokens: list[str] = []
    for line in text.splitlines():
        body = line.split("#", 1)[0].strip()
        if body:
            tokens.extend(body.split())
    if not tokens or tokens[0] != "OFF":
        raise InvalidInputError("not an OFF document")
    pos = 1
    nv, nf = int(tokens[pos]), int(tokens[pos + 1])
    pos += 3  # skip edge count
    vertices = []
    for _ in range(nv):
        vertices.append(tuple(float(t) for t in tokens[pos:pos + 3]))
        pos += 3
    faces = []
    for _ in range(nf):
        k = int(tokens[pos])
        if k != 3:
            raise InvalidInputError("only triangle faces are supported")
        faces.append(tuple(int(t) for t in tokens[pos + 1:pos + 4]))
        pos += 4
    return vertices, faces
