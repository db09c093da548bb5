from .record_serializers import (
    CondenseReportSerializer,
    ParamsReportSerializer,
    PrepTranscriptSerializer,
    RecordSerializer,
    StatsRecordSerializer,
    TrialRecordSerializer
)
from .run_config_serializers import (
    RunConfigSerializer
)
