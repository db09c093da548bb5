from rest_framework import serializers

from ..codes.builders import FAMILIES
from ..conf import get_setting
from ..services.condense_services import RECIPES
from ..utils import validate_lattice_spec

COMMANDS = ('params', 'stats', 'decode', 'prepare', 'condense')
QUERIES = ('tjunction', 'surface-spin', 'braiding', 'central-charge')
CODE_FAMILIES = tuple(f for f in FAMILIES if f in ('xyz', 'chiral', '3dcc', 'boundary'))


class RunConfigSerializer(serializers.Serializer):
    """Validated options for one command run"""
    command = serializers.ChoiceField(choices=COMMANDS)
    lattice = serializers.CharField(
        max_length=200,
        required=False,
        default='torus:2,2,2',
        help_text="Lattice spec such as cube8, torus:Lx,Ly,Lz or slab:Lx,Ly,t[,color]"
    )
    family = serializers.ChoiceField(choices=CODE_FAMILIES, required=False, default='xyz')
    d = serializers.IntegerField(min_value=2, required=False, default=2)
    alpha = serializers.IntegerField(required=False, default=1)
    p = serializers.FloatField(min_value=0.0, max_value=1.0, required=False, default=0.0)
    q = serializers.FloatField(min_value=0.0, max_value=1.0, required=False, default=0.0)
    trials = serializers.IntegerField(min_value=1, required=False, default=1)
    seed = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)
    block_size = serializers.IntegerField(
        min_value=1, required=False, allow_null=True, default=None
    )
    threads = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    distance_cap = serializers.IntegerField(
        min_value=0, required=False, allow_null=True, default=None
    )
    query = serializers.ChoiceField(choices=QUERIES, required=False, default='tjunction')
    i = serializers.IntegerField(required=False, default=1)
    j = serializers.IntegerField(required=False, default=1)
    recipe = serializers.ChoiceField(choices=RECIPES, required=False, default='semion')
    output = serializers.CharField(required=False, allow_blank=True, default='')
    summary = serializers.CharField(required=False, allow_blank=True, default='')
    xlsx = serializers.CharField(required=False, allow_blank=True, default='')

    def validate_lattice(self, value):
        """Validate the lattice spec names a known builder"""
        value = (value or '').strip()
        if not validate_lattice_spec(value):
            raise serializers.ValidationError(
                f"Unknown lattice spec '{value}'. Use cube8, tetra15, sphere, torus:Lx,Ly,Lz, "
                f"slab:Lx,Ly,t[,color] or a path to a .json file"
            )
        return value

    def validate_seed(self, value):
        if value is None:
            return get_setting('DEFAULT_SEED')
        return value

    def validate(self, attrs):
        command = attrs['command']
        d, alpha = attrs['d'], attrs['alpha']
        if attrs['family'] == 'xyz' and command in ('params', 'decode') and d != 2:
            raise serializers.ValidationError({'d': "The XYZ color code is a qubit code (d=2)"})
        if command == 'decode' and d != 2:
            raise serializers.ValidationError({'d': "Single-shot decoding runs on the qubit code"})
        if command == 'prepare' and d % 2 == 0:
            raise serializers.ValidationError({'d': "Ground-state preparation needs odd d"})
        if command == 'stats' and attrs['query'] == 'central-charge' and d % 2 == 0:
            raise serializers.ValidationError(
                {'d': "The central charge is defined for odd d; condense even d first"})
        if alpha % d == 0:
            raise serializers.ValidationError({'alpha': "alpha must be nonzero mod d"})
        return attrs
