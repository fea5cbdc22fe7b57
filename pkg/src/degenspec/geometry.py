"""Surface data model, closed-form cone geometry, and degenerating families.

A surface is described by its signature (genus, cusps, elliptic orders), a
sorted length spectrum, a list of small eigenvalues below 1/4, and the subset
of cone indices scheduled to degenerate into cusps.  Length spectra and
eigenvalues are model inputs; nothing is computed from group presentations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .errors import DomainError, InvariantViolation, ParseError, SignatureError

__all__ = [
    "SurfaceData",
    "DegeneratingFamily",
    "cone_volume",
    "cone_boundary_length",
    "cone_annulus_distance",
    "gauss_bonnet_volume",
    "hecke_family",
    "load_surface",
    "save_surface",
]

INF_ORDER = math.inf


def _check_order(q) -> float:
    if q == INF_ORDER:
        return INF_ORDER
    if q != int(q) or q < 2:
        raise DomainError(f"cone order must be an integer >= 2 or inf, got {q}")
    return int(q)


def cone_volume(q, eps: float) -> float:
    """Volume of the truncated cone of order q and area parameter eps.

    vol(C_{q,eps}) = eps for finite q; the cusp neighborhood C_{inf,eps}
    has volume eps/2.
    """
    if not eps > 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    q = _check_order(q)
    return eps / 2.0 if q == INF_ORDER else float(eps)


def cone_boundary_length(q, eps: float) -> float:
    """Boundary length of the truncated cone: sqrt(4 pi eps/q + eps^2) for
    finite q, and eps/2 for the cusp neighborhood."""
    if not eps > 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    q = _check_order(q)
    if q == INF_ORDER:
        return eps / 2.0
    return math.sqrt(4.0 * math.pi * eps / q + eps * eps)


def cone_annulus_distance(q, eps1: float, eps2: float) -> float:
    """Hyperbolic distance between the boundaries of the nested truncated
    cones C_{q,eps1} inside C_{q,eps2}.

    The closed form is a log ratio, so distances over nested triples add
    exactly.  q is treated as a formal positive parameter here; for the cusp
    (q = inf) the limit log(eps2/eps1) is returned.
    """
    if eps1 <= 0 or eps2 <= 0:
        raise DomainError("eps values must be > 0")
    if eps1 > eps2:
        raise DomainError(f"require eps1 <= eps2, got {eps1} > {eps2}")
    if eps1 == eps2:
        return 0.0
    if q == INF_ORDER:
        return math.log(eps2 / eps1)
    if not q > 0:
        raise DomainError(f"q must be positive, got {q}")

    def edge(e: float) -> float:
        return e * q + 2.0 * math.pi + math.sqrt(e * q * (4.0 * math.pi + e * q))

    return math.log(edge(eps2) / edge(eps1))


def gauss_bonnet_volume(genus: int, cusps: int, orders) -> float:
    """Hyperbolic area 2 pi (2g - 2 + p + sum_j (1 - 1/q_j)) of the orbifold
    with the given signature.  Raises SignatureError when the signature
    admits no hyperbolic structure."""
    if genus < 0 or cusps < 0:
        raise DomainError("genus and cusp count must be nonnegative")
    total = 2.0 * genus - 2.0 + cusps
    for q in orders:
        q = _check_order(q)
        total += 1.0 if q == INF_ORDER else 1.0 - 1.0 / q
    if total <= 0:
        raise SignatureError(
            f"signature (g={genus}, p={cusps}, orders={list(orders)}) admits "
            "no hyperbolic structure")
    return 2.0 * math.pi * total


@dataclass(frozen=True)
class SurfaceData:
    """Model of a hyperbolic surface with conical points.

    `degenerating` holds indices into `elliptic_orders` marking the cones
    scheduled to open into cusps.  The length spectrum is a sorted tuple of
    (length, multiplicity); small eigenvalues lie in [0, 1/4).  The volume is
    always the Gauss-Bonnet value of the signature; a caller-supplied value
    is cross-checked against it.
    """

    genus: int
    num_cusps: int
    elliptic_orders: tuple = ()
    degenerating: tuple = ()
    length_spectrum: tuple = ()
    small_eigenvalues: tuple = ()
    cusp_widths: tuple | None = None
    volume: float | None = None

    def __post_init__(self):
        try:
            orders = tuple(_check_order(q) for q in self.elliptic_orders)
        except DomainError as exc:
            raise InvariantViolation(str(exc)) from exc
        object.__setattr__(self, "elliptic_orders", orders)

        degen = tuple(sorted(set(int(i) for i in self.degenerating)))
        for i in degen:
            if not 0 <= i < len(orders):
                raise InvariantViolation(
                    f"degenerating index {i} outside elliptic_orders range")
        object.__setattr__(self, "degenerating", degen)

        spectrum = []
        for entry in self.length_spectrum:
            ell, mult = float(entry[0]), int(entry[1])
            if ell <= 0:
                raise InvariantViolation(f"geodesic length must be > 0, got {ell}")
            if mult < 1:
                raise InvariantViolation(f"multiplicity must be >= 1, got {mult}")
            spectrum.append((ell, mult))
        spectrum.sort()
        object.__setattr__(self, "length_spectrum", tuple(spectrum))

        eigs = tuple(sorted(float(x) for x in self.small_eigenvalues))
        for lam in eigs:
            if not 0.0 <= lam < 0.25:
                raise InvariantViolation(
                    f"small eigenvalues must lie in [0, 1/4), got {lam}")
        object.__setattr__(self, "small_eigenvalues", eigs)

        if self.cusp_widths is not None:
            widths = tuple(float(w) for w in self.cusp_widths)
            for w in widths:
                if w <= 0:
                    raise InvariantViolation(f"cusp width must be > 0, got {w}")
            object.__setattr__(self, "cusp_widths", widths)

        gb = gauss_bonnet_volume(self.genus, self.num_cusps, orders)
        if self.volume is not None:
            if abs(self.volume - gb) > 1e-9 * gb:
                raise InvariantViolation(
                    f"volume {self.volume} disagrees with the Gauss-Bonnet "
                    f"value {gb} beyond 1e-9 relative")
        object.__setattr__(self, "volume", gb)
        bound = 2.0 * math.pi * (2 * self.genus - 2 + self.kappa)
        if self.volume > bound + 1e-12:
            raise InvariantViolation(
                f"volume {self.volume} exceeds the cusped bound {bound}")

    @property
    def kappa(self) -> int:
        """Number of ends: cusps plus conical points."""
        return self.num_cusps + len(self.elliptic_orders)

    @property
    def degenerating_orders(self) -> tuple:
        return tuple(self.elliptic_orders[i] for i in self.degenerating)

    @property
    def kept_orders(self) -> tuple:
        """Elliptic orders outside the degenerating set."""
        return tuple(q for i, q in enumerate(self.elliptic_orders)
                     if i not in self.degenerating)

    def with_degenerating_orders(self, new_orders) -> "SurfaceData":
        """Copy with the degenerating cone orders replaced (volume refreshed)."""
        if len(new_orders) != len(self.degenerating):
            raise DomainError("one order per degenerating cone required")
        orders = list(self.elliptic_orders)
        for idx, q in zip(self.degenerating, new_orders):
            orders[idx] = _check_order(q)
        return replace(self, elliptic_orders=tuple(orders), volume=None)


@dataclass(frozen=True)
class DegeneratingFamily:
    """A surface template with a monotone schedule of degenerating orders.

    Each schedule entry assigns one order per degenerating cone and must
    dominate the previous entry componentwise.
    """

    template: SurfaceData
    schedule: tuple = ()

    def __post_init__(self):
        m = len(self.template.degenerating)
        if m == 0:
            raise InvariantViolation("template has no degenerating cones")
        rows = []
        for entry in self.schedule:
            row = tuple(_check_order(q) for q in entry)
            if len(row) != m:
                raise InvariantViolation(
                    f"schedule entry {entry} has {len(row)} orders, expected {m}")
            rows.append(row)
        for prev, cur in zip(rows[:-1], rows[1:]):
            if any(c < p for p, c in zip(prev, cur)):
                raise InvariantViolation(
                    f"schedule must be componentwise nondecreasing: "
                    f"{prev} -> {cur}")
        object.__setattr__(self, "schedule", tuple(rows))

    def __len__(self) -> int:
        return len(self.schedule)

    def member(self, k: int) -> SurfaceData:
        return self.template.with_degenerating_orders(self.schedule[k])

    def members(self):
        return [self.member(k) for k in range(len(self.schedule))]

    def log_products(self) -> list:
        """log(prod q_gamma) over the degenerating set, one per member."""
        return [sum(math.log(q) for q in row) for row in self.schedule]


# Arithmetic Hecke orders: the triangle group is commensurable with the
# modular group exactly for these.
HECKE_ARITHMETIC = (3, 4, 6)


def hecke_family(N_list, standard_signature: bool = False) -> DegeneratingFamily:
    """Degenerating family modeled on the Hecke triangle groups G_N.

    The default signature is genus zero, one cusp, elliptic orders (2, 3, N)
    with the N-cone degenerating.  standard_signature=True uses the (2, N)
    signature instead, whose N=3 volume is pi/3.  Length spectra and small
    eigenvalues are left empty: they are group data, not signature data.
    """
    Ns = [int(N) for N in N_list]
    if not Ns:
        raise DomainError("N_list must be nonempty")
    for N in Ns:
        if N < 3:
            raise DomainError(f"Hecke order must be >= 3, got {N}")
    if standard_signature:
        orders = (2, Ns[0])
        degen = (1,)
    else:
        orders = (2, 3, Ns[0])
        degen = (2,)
    template = SurfaceData(genus=0, num_cusps=1, elliptic_orders=orders,
                           degenerating=degen)
    return DegeneratingFamily(template=template,
                              schedule=tuple((N,) for N in Ns))


_SCHEMA_FIELDS = {"genus", "cusps", "elliptic_orders", "degenerating",
                  "lengths", "small_eigenvalues", "cusp_widths", "volume"}


def surface_to_dict(surface: SurfaceData) -> dict:
    out = {
        "genus": surface.genus,
        "cusps": surface.num_cusps,
        "elliptic_orders": list(surface.elliptic_orders),
        "degenerating": list(surface.degenerating),
        "lengths": [{"l": ell, "mult": mult}
                    for ell, mult in surface.length_spectrum],
        "small_eigenvalues": list(surface.small_eigenvalues),
        "volume": surface.volume,
    }
    if surface.cusp_widths is not None:
        out["cusp_widths"] = list(surface.cusp_widths)
    return out


def surface_from_dict(data: dict) -> SurfaceData:
    if not isinstance(data, dict):
        raise ParseError("surface file must contain a JSON object")
    unknown = set(data) - _SCHEMA_FIELDS
    if unknown:
        raise ParseError(f"unknown surface fields: {sorted(unknown)}")
    for key in ("genus", "cusps"):
        if key not in data:
            raise ParseError(f"missing required field '{key}'")
        if not isinstance(data[key], int) or data[key] < 0:
            raise ParseError(f"field '{key}' must be a nonnegative integer")
    lengths = []
    for i, entry in enumerate(data.get("lengths", [])):
        try:
            lengths.append((float(entry["l"]), int(entry.get("mult", 1))))
        except (TypeError, KeyError) as exc:
            raise ParseError(
                f"lengths[{i}] must be an object with fields 'l' and 'mult'"
            ) from exc
    orders = []
    for i, q in enumerate(data.get("elliptic_orders", [])):
        if q in ("inf", None):
            raise ParseError(f"elliptic_orders[{i}]: infinite orders are cusps;"
                             " use the 'cusps' field")
        orders.append(q)
    return SurfaceData(
        genus=data["genus"],
        num_cusps=data["cusps"],
        elliptic_orders=tuple(orders),
        degenerating=tuple(data.get("degenerating", [])),
        length_spectrum=tuple(lengths),
        small_eigenvalues=tuple(data.get("small_eigenvalues", [])),
        cusp_widths=(tuple(data["cusp_widths"])
                     if data.get("cusp_widths") is not None else None),
        volume=data.get("volume"),
    )


def load_surface(path) -> SurfaceData:
    """Load a surface from its JSON file, normalizing (sorting) on the way in.

    Raises ParseError with field diagnostics for malformed files and
    InvariantViolation naming the failed invariant for inconsistent data.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    return surface_from_dict(data)


def save_surface(surface: SurfaceData, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(surface_to_dict(surface), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_family(path) -> DegeneratingFamily:
    """Load a degenerating family: {"surface": {...}, "schedule": [[q,...],...]}."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    if not isinstance(data, dict) or "surface" not in data:
        raise ParseError("family file must be an object with a 'surface' field")
    template = surface_from_dict(data["surface"])
    schedule = data.get("schedule", [])
    if not isinstance(schedule, list):
        raise ParseError("'schedule' must be a list of order vectors")
    rows = tuple(tuple(row) if isinstance(row, list) else (row,)
                 for row in schedule)
    return DegeneratingFamily(template=template, schedule=rows)


def save_family(family: DegeneratingFamily, path) -> None:
    payload = {
        "surface": surface_to_dict(family.template),
        "schedule": [list(row) for row in family.schedule],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
