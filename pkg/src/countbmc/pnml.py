"""Reading and writing nets: the P/T-net PNML subset and a line-oriented
textual format.

Only plain place/transition nets are accepted; colored/high-level PNML is
rejected loudly.  Identifiers come from PNML ``id`` attributes; ``name``
labels are kept as display metadata only.
"""

from __future__ import annotations

import io
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import ParseError, UnsupportedFormatError
from .net import Marking, PetriNet

_PT_TYPE_RE = re.compile(r"(ptnet|PTNet)")


@dataclass(frozen=True)
class NetDocument:
    net_id: str
    net: PetriNet
    source_format: str  # "pnml" | "text"
    display_names: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.net_id:
            raise ParseError("net id must be nonempty")
        if self.source_format not in ("pnml", "text"):
            raise ParseError(f"unknown source format {self.source_format!r}")


def _local(tag: str) -> str:
    """Tag name with any XML namespace stripped."""
    return tag.rsplit("}", 1)[-1]


def _text_of(elem: ET.Element, child: str, path: str) -> str | None:
    """Trimmed content of `child/text`, or None if the child is absent."""
    for sub in elem:
        if _local(sub.tag) == child:
            for t in sub:
                if _local(t.tag) == "text":
                    return (t.text or "").strip()
            return (sub.text or "").strip()
    return None


def _nat(raw: str, what: str, path: str, minimum: int = 0) -> int:
    if not re.fullmatch(r"[0-9]+", raw):
        raise ParseError(f"{what} must be a natural number, got {raw!r}", path)
    value = int(raw)
    if value < minimum:
        raise ParseError(f"{what} must be >= {minimum}, got {value}", path)
    return value


def _walk_nodes(container: ET.Element, path: str):
    """Yield (kind, element, path) for places/transitions/arcs, flattening
    nested pages and skipping graphics/toolspecific clutter."""
    for child in container:
        kind = _local(child.tag)
        if kind == "page":
            yield from _walk_nodes(child, f"{path}/page[id={child.get('id', '?')}]")
        elif kind in ("place", "transition", "arc"):
            yield kind, child, f"{path}/{kind}[id={child.get('id', '?')}]"


def parse_pnml(data: bytes | str | io.IOBase) -> NetDocument:
    """Parse the P/T-net PNML subset into a NetDocument.

    Recognized: pnml/net/page?/place (optional initialMarking/text, default
    0), transition, arc (optional inscription/text weight, default 1).
    Duplicate arcs between the same ordered pair are summed.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    if isinstance(data, bytes):
        data = io.BytesIO(data)
    try:
        tree = ET.parse(data)
    except ET.ParseError as e:
        raise ParseError(f"not well-formed XML: {e}") from None
    root = tree.getroot()
    if _local(root.tag) != "pnml":
        raise ParseError(f"root element is {_local(root.tag)!r}, expected 'pnml'", "pnml")
    nets = [c for c in root if _local(c.tag) == "net"]
    if len(nets) != 1:
        raise ParseError(f"expected exactly one net element, found {len(nets)}", "pnml")
    net_elem = nets[0]
    net_id = net_elem.get("id") or "net"
    net_path = f"pnml/net[id={net_id}]"

    net_type = net_elem.get("type")
    if net_type and not _PT_TYPE_RE.search(net_type):
        raise UnsupportedFormatError(
            f"net type {net_type!r} is not a place/transition net", net_path
        )

    places: list[str] = []
    transitions: list[str] = []
    marking: dict[str, int] = {}
    arcs: dict[tuple[str, str], int] = {}
    display: dict[str, str] = {}
    seen_ids: set[str] = set()
    pending_arcs: list[tuple[str, str, int, str]] = []

    for kind, elem, path in _walk_nodes(net_elem, net_path):
        node_id = elem.get("id")
        if kind in ("place", "transition"):
            if not node_id:
                raise ParseError(f"{kind} is missing an id attribute", path)
            if node_id in seen_ids:
                raise ParseError(f"duplicate id {node_id!r}", path)
            seen_ids.add(node_id)
            label = _text_of(elem, "name", path)
            if label:
                display[node_id] = label
        if kind == "place":
            places.append(node_id)
            raw = _text_of(elem, "initialMarking", path)
            marking[node_id] = _nat(raw, "initial marking", path) if raw else 0
        elif kind == "transition":
            transitions.append(node_id)
        else:
            src, dst = elem.get("source"), elem.get("target")
            if not src or not dst:
                raise ParseError("arc is missing source or target", path)
            raw = _text_of(elem, "inscription", path)
            weight = _nat(raw, "arc weight", path, minimum=1) if raw else 1
            pending_arcs.append((src, dst, weight, path))

    known = set(places) | set(transitions)
    for src, dst, weight, path in pending_arcs:
        for end in (src, dst):
            if end not in known:
                raise ParseError(f"arc endpoint {end!r} is not a declared node", path)
        arcs[(src, dst)] = arcs.get((src, dst), 0) + weight

    net = PetriNet(
        places=tuple(places),
        transitions=tuple(transitions),
        arcs=arcs,
        initial_marking=tuple(marking[p] for p in places),
    )
    return NetDocument(net_id=net_id, net=net, source_format="pnml", display_names=display)


_TEXT_LINE = re.compile(
    r"""^(?:
        place\s+(?P<pname>\S+)(?:\s*=\s*(?P<ptokens>\S+))?
      | trans\s+(?P<tname>\S+)
      | arc\s+(?P<src>\S+)\s*->\s*(?P<dst>\S+)(?:\s*\*\s*(?P<weight>\S+))?
    )\s*$""",
    re.VERBOSE,
)


def parse_textnet(text: str, net_id: str = "net") -> NetDocument:
    """Parse the line-oriented textual format.

    Grammar, one declaration per line (lines starting with ``#`` are
    comments)::

        place <name> [= <nat>]
        trans <name>
        arc <src> -> <dst> [* <weight>]
    """
    places: list[str] = []
    transitions: list[str] = []
    marking: dict[str, int] = {}
    arcs: dict[tuple[str, str], int] = {}
    pending_arcs: list[tuple[str, str, int, str]] = []

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        where = f"line {lineno}"
        if not line or line.startswith("#"):
            continue
        m = _TEXT_LINE.match(line)
        if not m:
            keyword = line.split()[0]
            if keyword not in ("place", "trans", "arc"):
                raise ParseError(f"unknown declaration {keyword!r}", where)
            raise ParseError(f"malformed {keyword} declaration: {line!r}", where)
        if m.group("pname"):
            name = m.group("pname")
            if name in places or name in transitions:
                raise ParseError(f"duplicate name {name!r}", where)
            places.append(name)
            raw = m.group("ptokens")
            marking[name] = _nat(raw, "initial marking", where) if raw else 0
        elif m.group("tname"):
            name = m.group("tname")
            if name in places or name in transitions:
                raise ParseError(f"duplicate name {name!r}", where)
            transitions.append(name)
        else:
            src, dst = m.group("src"), m.group("dst")
            raw = m.group("weight")
            weight = _nat(raw, "arc weight", where, minimum=1) if raw else 1
            pending_arcs.append((src, dst, weight, where))

    place_set, trans_set = set(places), set(transitions)
    for src, dst, weight, where in pending_arcs:
        for end in (src, dst):
            if end not in place_set and end not in trans_set:
                raise ParseError(f"arc endpoint {end!r} is not a declared node", where)
        same_kind = (src in place_set) == (dst in place_set)
        if same_kind:
            raise ParseError("arc must connect a place and a transition", where)
        arcs[(src, dst)] = arcs.get((src, dst), 0) + weight

    net = PetriNet(
        places=tuple(places),
        transitions=tuple(transitions),
        arcs=arcs,
        initial_marking=tuple(marking[p] for p in places),
    )
    return NetDocument(net_id=net_id, net=net, source_format="text")


def write_pnml(doc: NetDocument) -> bytes:
    """Serialize to PNML, deterministically (declaration order throughout)."""
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<pnml xmlns="http://www.pnml.org/version-2009/grammar/pnml">',
        f'  <net id="{_xml_escape(doc.net_id)}"'
        ' type="http://www.pnml.org/version-2009/grammar/ptnet">',
        '    <page id="page0">',
    ]
    net = doc.net
    for i, p in enumerate(net.places):
        lines.append(f'      <place id="{_xml_escape(p)}">')
        label = doc.display_names.get(p)
        if label:
            lines.append(f"        <name><text>{_xml_escape(label)}</text></name>")
        tokens = net.initial_marking[i]
        if tokens:
            lines.append(f"        <initialMarking><text>{tokens}</text></initialMarking>")
        lines.append("      </place>")
    for t in net.transitions:
        label = doc.display_names.get(t)
        if label:
            lines.append(f'      <transition id="{_xml_escape(t)}">')
            lines.append(f"        <name><text>{_xml_escape(label)}</text></name>")
            lines.append("      </transition>")
        else:
            lines.append(f'      <transition id="{_xml_escape(t)}"/>')
    arc_no = 0
    for src, dst in _arc_order(net):
        weight = net.arcs[(src, dst)]
        arc_id = f"a{arc_no}"
        arc_no += 1
        head = (
            f'      <arc id="{arc_id}" source="{_xml_escape(src)}"'
            f' target="{_xml_escape(dst)}"'
        )
        if weight != 1:
            lines.append(head + ">")
            lines.append(f"        <inscription><text>{weight}</text></inscription>")
            lines.append("      </arc>")
        else:
            lines.append(head + "/>")
    lines += ["    </page>", "  </net>", "</pnml>", ""]
    return "\n".join(lines).encode("utf-8")


def write_textnet(doc: NetDocument) -> str:
    """Serialize to the textual format, deterministically."""
    net = doc.net
    lines = [f"# net {doc.net_id}"]
    for i, p in enumerate(net.places):
        tokens = net.initial_marking[i]
        lines.append(f"place {p} = {tokens}" if tokens else f"place {p}")
    for t in net.transitions:
        lines.append(f"trans {t}")
    for src, dst in _arc_order(net):
        weight = net.arcs[(src, dst)]
        suffix = f" * {weight}" if weight != 1 else ""
        lines.append(f"arc {src} -> {dst}{suffix}")
    return "\n".join(lines) + "\n"


def _arc_order(net: PetriNet):
    """Arcs in declaration order: grouped by transition, pre-arcs first."""
    for t in net.transitions:
        for p, _ in net.pre[t]:
            yield (p, t)
        for p, _ in net.post[t]:
            yield (t, p)


def _xml_escape(s: str) -> str:
    return (
        s.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def load_net(path) -> NetDocument:
    """Load a net file, picking the format by content sniffing."""
    from pathlib import Path

    p = Path(path)
    data = p.read_bytes()
    head = data.lstrip()[:6]
    if head.startswith(b"<"):
        doc = parse_pnml(data)
    else:
        doc = parse_textnet(data.decode("utf-8"), net_id=p.stem)
    return doc
