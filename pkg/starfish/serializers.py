"""
Сериализаторы артефактов (JSON-отчеты команд).

Каждый артефакт несет schema_version; ключи сортируются при записи
(см. reporting.Reporter), поэтому одинаковые запуски дают побайтно равные файлы.
"""
import math

from rest_framework import serializers

from .constants import ReportConstants
from .hyperbolic_group import IsometryPSL2
from .shortening import PolylineLoop
from .sweepout import width_upper_bound


class MatrixField(serializers.ListField):
    """Матрица 2x2 как [[a, b], [c, d]]"""

    child = serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2)

    def __init__(self, **kwargs):
        kwargs.setdefault('min_length', 2)
        kwargs.setdefault('max_length', 2)
        super().__init__(**kwargs)

    def to_representation(self, value):
        if isinstance(value, IsometryPSL2):
            value = value.to_list()
        return [[float(entry) for entry in row] for row in value]


class FloatOrNullField(serializers.FloatField):
    """Нечисловые значения (nan, inf) пишутся как null"""

    def to_representation(self, value):
        value = float(value)
        return value if math.isfinite(value) else None


class LoopSerializer(serializers.Serializer):
    word = serializers.CharField(allow_blank=True, required=False, default='')
    cusp = serializers.IntegerField(min_value=1, max_value=3)
    frame = MatrixField()
    closing = MatrixField()
    vertices = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2),
        min_length=8,
    )

    def to_representation(self, instance):
        if isinstance(instance, PolylineLoop):
            instance = instance.to_dict()
        return super().to_representation(instance)

    def validate_vertices(self, value):
        if any(y <= 0.0 for _, y in value):
            raise serializers.ValidationError('Вершины должны лежать в верхней полуплоскости.')
        return value

    def create(self, validated_data):
        return PolylineLoop.from_dict(validated_data)


class ArtifactSerializer(serializers.Serializer):
    schema_version = serializers.SerializerMethodField()
    kind = serializers.SerializerMethodField()

    artifact_kind = ''

    def get_schema_version(self, instance):
        return ReportConstants.SCHEMA_VERSION

    def get_kind(self, instance):
        return self.artifact_kind


# ============================================================================
# АТЛАС
# ============================================================================

class AtlasArtifactSerializer(ArtifactSerializer):
    artifact_kind = 'atlas'

    rho_star = serializers.FloatField()
    admissibility_margin = serializers.FloatField()
    thin_part_distance = serializers.FloatField()
    atlas = serializers.DictField()


# ============================================================================
# СЛОВА
# ============================================================================

class WordRowSerializer(serializers.Serializer):
    word = serializers.CharField()
    letters = serializers.IntegerField()
    kind = serializers.CharField()
    trace = serializers.FloatField()
    length = FloatOrNullField(allow_null=True)
    is_minimal = serializers.BooleanField()


class WordsArtifactSerializer(ArtifactSerializer):
    artifact_kind = 'words'

    max_word_len = serializers.IntegerField()
    min_length = FloatOrNullField(allow_null=True)
    witnesses = serializers.ListField(child=serializers.CharField())
    rows = WordRowSerializer(many=True)


# ============================================================================
# СИСТОЛА
# ============================================================================

class RunRecordSerializer(serializers.Serializer):
    word = serializers.CharField()
    seed = serializers.IntegerField()
    outcome = serializers.CharField()
    length = FloatOrNullField(allow_null=True)
    intersections = serializers.IntegerField(allow_null=True)
    thin_avoidance = serializers.BooleanField(allow_null=True)
    isometric_vertices = serializers.BooleanField(allow_null=True)
    max_turning_angle = FloatOrNullField(allow_null=True)
    reintegration_gap = FloatOrNullField(allow_null=True)
    sweeps = serializers.IntegerField()
    message = serializers.CharField(allow_blank=True)


class WitnessSerializer(RunRecordSerializer):
    loop = LoopSerializer()


class SystoleArtifactSerializer(ArtifactSerializer):
    artifact_kind = 'systole'

    rho_star = serializers.FloatField()
    words = serializers.ListField(child=serializers.CharField())
    config = serializers.DictField()
    min_length = FloatOrNullField(allow_null=True)
    figure_eight_length = serializers.FloatField()
    witnesses = WitnessSerializer(many=True)
    simple_geodesics = serializers.ListField(child=serializers.CharField())
    records = RunRecordSerializer(many=True)


# ============================================================================
# РАЗВЕРТКА
# ============================================================================

class FrameSerializer(serializers.Serializer):
    time = serializers.FloatField()
    length = serializers.FloatField()
    cycle = LoopSerializer(many=True)


class SweepoutArtifactSerializer(ArtifactSerializer):
    artifact_kind = 'sweepout'

    rho_star = serializers.FloatField()
    systole = serializers.FloatField()
    width_upper_bound = serializers.FloatField()
    ratio = serializers.FloatField()
    boundary_length = serializers.FloatField()
    waist_index = serializers.IntegerField()
    waist_time = serializers.FloatField()
    slack = serializers.FloatField()
    offset_step = serializers.FloatField()
    max_frame_step = serializers.FloatField()
    coverage_parity = FloatOrNullField(allow_null=True)
    coverage_heuristic = serializers.SerializerMethodField()
    frames = FrameSerializer(many=True)

    def get_coverage_heuristic(self, instance):
        return True


def sweepout_payload(atlas, family, systole):
    """Плоский объект для SweepoutArtifactSerializer"""
    width = width_upper_bound(family)
    return {
        'rho_star': atlas.rho_star,
        'systole': systole,
        'width_upper_bound': width,
        'ratio': width / systole,
        'boundary_length': family.boundary_length,
        'waist_index': family.waist_index,
        'waist_time': float(family.times[family.waist_index]),
        'slack': family.slack,
        'offset_step': family.offset_step,
        'max_frame_step': family.max_frame_step,
        'coverage_parity': family.coverage_parity,
        'frames': [
            {'time': float(time), 'length': float(length), 'cycle': cycle}
            for time, length, cycle in zip(family.times, family.lengths, family.cycles)
        ],
    }


def load_loop(data):
    """PolylineLoop из словаря с проверкой через LoopSerializer"""
    serializer = LoopSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()
