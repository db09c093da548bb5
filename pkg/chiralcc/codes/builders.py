"""
Code builders.

Every family is a list of face (or volume) generators bound to a lattice. The
per-site factor of a face generator depends only on the face color and the
bipartition sign of the site:

    ====== ========== ==================
    color  XYZ (d=2)  chiral (d, alpha)
    ====== ========== ==================
    AB CD  X          X
    AC BD  Y          X^-1 Z^(-alpha lam)
    AD BC  Z          Z^(alpha lam)
    ====== ========== ==================

Factors carry the Weyl phase that gives them order d, so for d = 2 the AC/BD
factor is exactly Y.

Usage:
    from chiralcc.codes import build_chiral
    from chiralcc.lattice import build_torus

    code = build_chiral(build_torus(2, 2, 2), d=3, alpha=1)
"""

import logging
from functools import cached_property
from math import gcd

import numpy as np

from ..exceptions import ParameterError, StructureError
from ..pauli import PauliOperator, stack_symplectic, weyl_phase
from ..utils import render_phase

logger = logging.getLogger(__name__)

FAMILIES = ('xyz', 'chiral', '3dcc', '2dcc', 'boundary', 'condensed', 'tensor')

# (x, z) per face color; z is multiplied by alpha*lam for the chiral family
_XYZ_NATIVES = {'AB': (1, 0), 'CD': (1, 0), 'AC': (1, 1), 'BD': (1, 1), 'AD': (0, 1), 'BC': (0, 1)}
_CHIRAL_NATIVES = {'AB': (1, 0), 'CD': (1, 0), 'AC': (-1, -1), 'BD': (-1, -1), 'AD': (0, 1),
                   'BC': (0, 1)}


def native_exponents(colors, lam, d, alpha=1, family='chiral'):
    """
    Exponents (x, z) of the native single-site factor of a face.

    When gcd(d, alpha) != 1 the AD/BC factor drops alpha and becomes Z^lam.

    Args:
        colors: Two-letter face color
        lam: Bipartition sign of the site
        d: Qudit dimension
        alpha: Chirality
        family: "xyz" or "chiral"

    Returns:
        tuple (x, z) reduced mod d
    """
    key = ''.join(sorted(colors))
    if family == 'xyz':
        x, z = _XYZ_NATIVES[key]
        return x % d, z % d
    if family != 'chiral':
        raise ParameterError(f"Natives are defined for xyz and chiral families, not {family!r}")
    x, z = _CHIRAL_NATIVES[key]
    if key in ('AD', 'BC') and gcd(d, alpha) != 1:
        return 0, lam % d
    return x % d, (z * alpha * lam) % d


def _check_dimension(d, alpha):
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ParameterError(f"Qudit dimension must be an integer >= 2, got {d!r}")
    if not isinstance(alpha, (int, np.integer)):
        raise ParameterError(f"Chirality must be an integer, got {alpha!r}")


def _check_lattice(lattice):
    report = lattice.validate()
    if not report.passed:
        raise StructureError(f"Lattice {lattice.name} is invalid: {report.kinds()}")


# ==================== Codes ====================

class StabilizerCode:
    """
    Generators over Z_d bound to a lattice.

    Args:
        family: One of FAMILIES
        d: Qudit dimension
        generators: List of PauliOperator on n sites
        sources: One descriptor per generator, e.g. ("face", 12)
        lattice: ColorLattice the code lives on
        alpha: Chirality (1 for the qubit families)
        sites: Lattice site of each code site (identity when omitted)
        natives: Native factor table used for string operators ("xyz" or "chiral")
        warnings: Flags raised during construction
    """

    def __init__(self, family, d, generators, sources=None, lattice=None, alpha=1, sites=None,
                 natives=None, warnings=(), name='', n=None):
        if family not in FAMILIES:
            raise ParameterError(f"Unknown code family {family!r}")
        self.family = family
        self.d = int(d)
        self.alpha = int(alpha)
        self.generators = tuple(generators)
        if n is None:
            if sites is not None:
                n = len(sites)
            elif lattice is not None:
                n = lattice.n
            elif self.generators:
                n = self.generators[0].n
            else:
                raise StructureError("Cannot infer the site count of an empty code")
        self._n = int(n)
        for g in self.generators:
            if g.d != self.d or g.n != self._n:
                raise StructureError(f"Generator {g!r} does not match d={self.d}, n={self._n}")
        self.sources = tuple(sources) if sources is not None else tuple(
            ('generator', i) for i in range(len(self.generators)))
        self.lattice = lattice
        self.sites = None if sites is None else np.asarray(sites, dtype=np.int64)
        self.natives = natives
        self.warnings = tuple(warnings)
        self.name = name or family

    @property
    def n(self):
        return self._n

    def __len__(self):
        return len(self.generators)

    @cached_property
    def site_index(self):
        """Lattice site -> code site."""
        if self.sites is None:
            return {v: v for v in range(self.n)}
        return {int(v): k for k, v in enumerate(self.sites)}

    def code_site(self, v):
        try:
            return self.site_index[int(v)]
        except KeyError:
            raise ParameterError(f"Lattice site {v} is not a site of code {self.name}") from None

    def lattice_site(self, k):
        return int(k) if self.sites is None else int(self.sites[k])

    @cached_property
    def symplectic(self):
        matrix = stack_symplectic(self.generators, self.n)
        matrix.setflags(write=False)
        return matrix

    @property
    def gx(self):
        return self.symplectic[:, :self.n]

    @property
    def gz(self):
        return self.symplectic[:, self.n:]

    @cached_property
    def check_matrix(self):
        """Rows [Gz | -Gx]: ``check_matrix @ (x; z)`` is the syndrome of (x, z)."""
        matrix = np.mod(np.hstack([self.gz, -self.gx]), self.d)
        matrix.setflags(write=False)
        return matrix

    @cached_property
    def source_index(self):
        return {source: i for i, source in enumerate(self.sources)}

    def generator_for(self, source):
        return self.generators[self.source_index[source]]

    def syndrome(self, operator):
        """Per-generator commutation exponents with an operator."""
        if operator.n != self.n or operator.d != self.d:
            raise StructureError(f"Operator does not act on code {self.name}")
        return np.mod(self.gz @ operator.x - self.gx @ operator.z, self.d)

    def syndromes(self, x, z):
        """Batch syndromes for row-stacked exponent arrays (k x n)."""
        return np.mod(np.asarray(x) @ self.gz.T - np.asarray(z) @ self.gx.T, self.d)

    def to_dict(self):
        return {
            'family': self.family,
            'name': self.name,
            'd': self.d,
            'alpha': self.alpha,
            'n': self.n,
            'warnings': list(self.warnings),
            'generators': [
                {
                    'source': list(source),
                    'phase': g.phase,
                    'phase_text': render_phase(g.phase, self.d),
                    'sites': {str(v): list(xz) for v, xz in g.sparse().items()},
                }
                for source, g in zip(self.sources, self.generators)
            ],
        }

    def __repr__(self):
        return (f"StabilizerCode({self.name!r}, d={self.d}, alpha={self.alpha}, n={self.n}, "
                f"m={len(self)})")


class GaugeCode:
    """Face operators X(f) and lam-signed Z(f); the group they generate is non-abelian."""

    def __init__(self, lattice, d, x_generators, z_generators, sources):
        self.lattice = lattice
        self.d = int(d)
        self.x_generators = tuple(x_generators)
        self.z_generators = tuple(z_generators)
        self.sources = tuple(sources)

    @property
    def n(self):
        return self.lattice.n

    @property
    def generators(self):
        return self.x_generators + self.z_generators

    @cached_property
    def symplectic(self):
        matrix = stack_symplectic(self.generators, self.n)
        matrix.setflags(write=False)
        return matrix

    def __repr__(self):
        return f"GaugeCode({self.lattice.name!r}, d={self.d}, m={len(self.generators)})"


# ==================== Operators ====================

def face_operator(lattice, f, d, alpha=1, family='chiral', site_index=None, n=None):
    """
    Face stabilizer S(f) with Weyl-normalized factors.

    Args:
        lattice: ColorLattice
        f: Face id
        site_index: Optional lattice site -> code site map (for boundary codes)
        n: Code size when site_index is given
    """
    face = lattice.faces[f]
    size = lattice.n if site_index is None else n
    x = np.zeros(size, dtype=np.int64)
    z = np.zeros(size, dtype=np.int64)
    for v in face.vertices:
        k = v if site_index is None else site_index[v]
        x[k], z[k] = native_exponents(face.colors, int(lattice.lam[v]), d, alpha, family)
    return PauliOperator.weyl(d, x, z)


def x_operator(n, d, sites, power=1):
    x = np.zeros(n, dtype=np.int64)
    x[list(sites)] = power
    return PauliOperator.weyl(d, x, np.zeros(n, dtype=np.int64))


def z_operator(n, d, sites, signs, power=1):
    """Z^(power * sign) on each site."""
    z = np.zeros(n, dtype=np.int64)
    z[list(sites)] = np.asarray(signs, dtype=np.int64) * power
    return PauliOperator.weyl(d, np.zeros(n, dtype=np.int64), z)


def volume_operator(lattice, c, kind, d=2, alpha=1):
    """
    Volume operators X(c), Z^alpha(c) or X^-1 Z^-alpha(c) (kind "x", "z" or "xz").
    """
    sites = list(lattice.volumes[c].vertices)
    lam = lattice.lam[sites]
    n = lattice.n
    x = np.zeros(n, dtype=np.int64)
    z = np.zeros(n, dtype=np.int64)
    if kind == 'x':
        x[sites] = 1
    elif kind == 'z':
        z[sites] = alpha * lam
    elif kind == 'xz':
        x[sites] = -1
        z[sites] = -alpha * lam
    else:
        raise ParameterError(f"Unknown volume operator kind {kind!r}")
    return PauliOperator.weyl(d, x, z)


# ==================== Families ====================

def build_xyz(lattice):
    """
    The XYZ color code: X on AB/CD faces, Y on AC/BD faces, Z on AD/BC faces.

    Returns:
        StabilizerCode with d = 2
    """
    _check_lattice(lattice)
    generators = [face_operator(lattice, face.id, 2, 1, 'xyz') for face in lattice.faces]
    sources = [('face', face.id) for face in lattice.faces]
    code = StabilizerCode('xyz', 2, generators, sources, lattice=lattice, natives='xyz',
                          name=f'xyz[{lattice.name}]', n=lattice.n)
    logger.info(f"Built {code!r}")
    return code


def build_chiral(lattice, d, alpha):
    """
    The chiral color code over Z_d with chirality alpha.

    When gcd(d, alpha) != 1 the code is still built, with Z^lam on AD/BC faces, and
    carries the warning "non_coprime".

    Returns:
        StabilizerCode
    """
    _check_dimension(d, alpha)
    _check_lattice(lattice)
    warnings = []
    if gcd(d, alpha) != 1:
        logger.warning(f"gcd(d={d}, alpha={alpha}) != 1; the code has no topological order")
        warnings.append('non_coprime')
    generators = [face_operator(lattice, face.id, d, alpha, 'chiral') for face in lattice.faces]
    sources = [('face', face.id) for face in lattice.faces]
    code = StabilizerCode('chiral', d, generators, sources, lattice=lattice, alpha=alpha,
                          natives='chiral', warnings=warnings,
                          name=f'chiral[{lattice.name},d={d},a={alpha}]', n=lattice.n)
    logger.info(f"Built {code!r}")
    return code


def build_gauge(lattice, d=2):
    """Gauge color code generators X(f) and Z(f) for every face."""
    _check_dimension(d, 1)
    x_generators = []
    z_generators = []
    sources = []
    for face in lattice.faces:
        sites = list(face.vertices)
        x_generators.append(x_operator(lattice.n, d, sites))
        z_generators.append(z_operator(lattice.n, d, sites, lattice.lam[sites]))
        sources.append(('face', face.id))
    return GaugeCode(lattice, d, x_generators, z_generators, sources)


def build_3dcc(lattice, d=2):
    """
    3D color code: X(c) on volumes and lam-signed Z(f) on faces.
    """
    _check_dimension(d, 1)
    _check_lattice(lattice)
    generators = []
    sources = []
    for volume in lattice.volumes:
        generators.append(x_operator(lattice.n, d, volume.vertices))
        sources.append(('volume', volume.id))
    for face in lattice.faces:
        sites = list(face.vertices)
        generators.append(z_operator(lattice.n, d, sites, lattice.lam[sites]))
        sources.append(('face', face.id))
    return StabilizerCode('3dcc', d, generators, sources, lattice=lattice,
                          name=f'3dcc[{lattice.name}]', n=lattice.n)


def build_2dcc(layer, d=2):
    """
    2D color code on a hexagonal layer: X(f) and lam-signed Z(f) per hexagon.

    Args:
        layer: HexLayer
    """
    _check_dimension(d, 1)
    generators = []
    sources = []
    for i, face in enumerate(layer.faces):
        sites = list(face)
        generators.append(x_operator(layer.n, d, sites))
        sources.append(('x', i))
    for i, face in enumerate(layer.faces):
        sites = list(face)
        generators.append(z_operator(layer.n, d, sites, layer.lam[sites]))
        sources.append(('z', i))
    return StabilizerCode('2dcc', d, generators, sources, name='2dcc', n=layer.n)


def build_boundary(lattice, color, family='xyz', d=2, alpha=1, region=None):
    """
    Boundary code: the face generators of one colored boundary, on its sites only.

    Args:
        lattice: ColorLattice exposing the boundary
        color: Boundary color
        family: "xyz" or "chiral"
        region: Fictitious-vertex label selecting one boundary component

    Returns:
        StabilizerCode whose ``sites`` map code sites to lattice sites
    """
    if family == 'xyz':
        d, alpha = 2, 1
    _check_dimension(d, alpha)
    faces = lattice.boundary_faces(color, region)
    if not faces:
        where = f" region {region!r}" if region else ''
        raise ParameterError(f"Lattice {lattice.name} has no {color} boundary{where}")
    sites = lattice.boundary_sites(color, region)
    index = {v: k for k, v in enumerate(sites)}
    generators = [face_operator(lattice, f, d, alpha, family, site_index=index, n=len(sites))
                  for f in faces]
    warnings = ['non_coprime'] if family == 'chiral' and gcd(d, alpha) != 1 else []
    code = StabilizerCode('boundary', d, generators, [('face', f) for f in faces],
                          lattice=lattice, alpha=alpha, sites=sites, natives=family,
                          warnings=warnings,
                          name=f'boundary[{lattice.name},{color},{family},d={d}]')
    code.boundary = {'color': color, 'region': region, 'family': family}
    logger.info(f"Built {code!r}")
    return code


def tensor_codes(codes, family='tensor'):
    """
    Stack codes on disjoint registers; copy j occupies sites ``j*n .. (j+1)*n - 1``.
    """
    codes = list(codes)
    if not codes:
        raise StructureError("Nothing to tensor")
    d = codes[0].d
    if any(code.d != d for code in codes):
        raise StructureError("Tensor copies need the same qudit dimension")
    sizes = [code.n for code in codes]
    total = sum(sizes)
    generators = []
    sources = []
    offset = 0
    for j, code in enumerate(codes):
        for source, g in zip(code.sources, code.generators):
            x = np.zeros(total, dtype=np.int64)
            z = np.zeros(total, dtype=np.int64)
            x[offset:offset + code.n] = g.x
            z[offset:offset + code.n] = g.z
            generators.append(PauliOperator(d, x, z, g.phase))
            sources.append((f'copy{j}',) + tuple(source))
        offset += code.n
    first = codes[0]
    tensor = StabilizerCode(family, d, generators, sources, lattice=first.lattice,
                            alpha=first.alpha, natives=first.natives,
                            name=f'{len(codes)}x{first.name}', n=total)
    tensor.copies = tuple(codes)
    return tensor


__all__ = [
    'FAMILIES', 'GaugeCode', 'StabilizerCode', 'build_2dcc', 'build_3dcc', 'build_boundary',
    'build_chiral', 'build_gauge', 'build_xyz', 'face_operator', 'native_exponents',
    'tensor_codes', 'volume_operator', 'weyl_phase', 'x_operator', 'z_operator',
]
