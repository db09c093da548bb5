from rest_framework import serializers

from ..conf import get_schema_version


class RecordSerializer(serializers.Serializer):
    """Base for JSON records: every record carries the schema version"""
    schema_version = serializers.SerializerMethodField()

    def get_schema_version(self, obj):
        return get_schema_version()


class TrialRecordSerializer(RecordSerializer):
    """Serializer for one decoded trial - reads TrialRecord.to_dict()"""
    trial = serializers.IntegerField()
    error = serializers.JSONField()
    true_syndrome = serializers.JSONField()
    measured_syndrome = serializers.JSONField()
    repaired_syndrome = serializers.JSONField()
    correction = serializers.JSONField()
    residual = serializers.JSONField()
    residual_weight = serializers.IntegerField()
    success = serializers.BooleanField()
    logical = serializers.CharField()


class PrepTranscriptSerializer(RecordSerializer):
    """Serializer for one preparation run"""
    lattice = serializers.CharField()
    d = serializers.IntegerField()
    alpha = serializers.IntegerField()
    seed = serializers.IntegerField(allow_null=True)
    block_size = serializers.IntegerField()
    sampled_syndrome = serializers.JSONField()
    stages = serializers.JSONField()
    final_syndrome = serializers.JSONField()
    verified = serializers.BooleanField()
    radius = serializers.IntegerField(allow_null=True)
    phase_exponent = serializers.IntegerField()
    correction_weight = serializers.IntegerField()


class StatsRecordSerializer(RecordSerializer):
    """Serializer for one statistics query"""
    query = serializers.CharField()
    lattice = serializers.CharField(allow_null=True)
    d = serializers.IntegerField()
    alpha = serializers.IntegerField()
    value = serializers.IntegerField()
    expected = serializers.IntegerField(allow_null=True)
    rendered = serializers.CharField()
    passed = serializers.BooleanField()
    detail = serializers.JSONField(required=False, default=dict)


class ParamsReportSerializer(RecordSerializer):
    """Serializer for code parameters"""
    lattice = serializers.CharField()
    family = serializers.CharField()
    d = serializers.IntegerField()
    alpha = serializers.IntegerField()
    n = serializers.IntegerField()
    generators = serializers.IntegerField()
    redundancy = serializers.JSONField()
    logical_group = serializers.ListField(child=serializers.IntegerField())
    k = serializers.IntegerField()
    distance = serializers.JSONField(allow_null=True)
    warnings = serializers.ListField(child=serializers.CharField())


class CondenseReportSerializer(RecordSerializer):
    """Serializer for a condensation report"""
    recipe = serializers.CharField()
    lattice = serializers.CharField()
    before = serializers.JSONField()
    after = serializers.JSONField()
    measured = serializers.IntegerField()
    checks = serializers.JSONField()
    passed = serializers.BooleanField()
