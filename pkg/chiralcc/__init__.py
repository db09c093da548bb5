"""
Chiral Color Codes
~~~~~~~~~~~~~~~~~~

A Django app and workbench for the XYZ and chiral color codes on four-colorable
3D lattices: exact qudit Pauli algebra, code construction and logical counting,
anyon statistics, single-shot decoding, ground-state preparation and boson
condensation.

:license: MIT, see LICENSE for more details.
"""

__version__ = '1.0.0'
__license__ = 'MIT'
