import logging
import sys
from typing import Optional, Dict, Any
from contextlib import contextmanager

from opentelemetry import trace, _logs
from opentelemetry.trace import SpanKind
from opentelemetry.sdk.resources import SERVICE_NAME, Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor
from opentelemetry.exporter.otlp.proto.http.trace_exporter import OTLPSpanExporter

# For Logs
from opentelemetry.sdk._logs import LoggerProvider, LoggingHandler
from opentelemetry.sdk._logs.export import BatchLogRecordProcessor
from opentelemetry.exporter.otlp.proto.http._log_exporter import OTLPLogExporter
from pythonjsonlogger.json import JsonFormatter

from util.settings import load_settings

ROOT_LOGGER = "zerodiff"

# Resource for both traces and logs
resources = Resource.create({SERVICE_NAME: "zerodiff"})

trace.set_tracer_provider(TracerProvider(resource=resources))
tracer = trace.get_tracer("zerodiff_log")
logger_provider = LoggerProvider(resource=resources)
_logs.set_logger_provider(logger_provider)

# OTLP export only when a collector is configured
_settings = load_settings()
_endpoint = _settings.otlp_endpoint
if _endpoint:
    otlp_trace_exporter = OTLPSpanExporter(endpoint=f"{_endpoint.rstrip('/')}/v1/traces")
    trace.get_tracer_provider().add_span_processor(BatchSpanProcessor(otlp_trace_exporter))
    otlp_log_exporter = OTLPLogExporter(endpoint=f"{_endpoint.rstrip('/')}/v1/logs")
    logger_provider.add_log_record_processor(BatchLogRecordProcessor(otlp_log_exporter))


def _configure_root() -> logging.Logger:
    root = logging.getLogger(ROOT_LOGGER)
    if getattr(root, "_zerodiff_configured", False):
        return root
    root.setLevel(_settings.log_level.upper())
    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(JsonFormatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
    root.addHandler(stream)
    if _endpoint:
        root.addHandler(LoggingHandler(level=logging.NOTSET, logger_provider=logger_provider))
    root.propagate = False
    root._zerodiff_configured = True  # type: ignore[attr-defined]
    return root


_configure_root()


def _attr(value: Any) -> Any:
    # span attributes accept primitives and homogeneous sequences only
    if isinstance(value, (str, bool, int, float)):
        return value
    if isinstance(value, (list, tuple)) and all(isinstance(v, (int, float)) for v in value):
        return list(value)
    return str(value)


class Log:
    def __init__(self, name: str, context: Optional[Dict[str, Any]] = None):
        if not name.startswith(ROOT_LOGGER):
            name = f"{ROOT_LOGGER}.{name}"
        self.logger = logging.getLogger(name)
        self.context = context or {}
        self.tracer = tracer

    def with_context(self, **kwargs) -> 'Log':
        new_context = {**self.context, **kwargs}
        return Log(self.logger.name, new_context)

    def info(self, message: str, **kwargs):
        self.logger.info(message, extra={**self.context, **kwargs})

    def error(self, message: str, **kwargs):
        self.logger.error(message, extra={**self.context, **kwargs})

    def debug(self, message: str, **kwargs):
        self.logger.debug(message, extra={**self.context, **kwargs})

    def warning(self, message: str, **kwargs):
        self.logger.warning(message, extra={**self.context, **kwargs})

    @contextmanager
    def trace(self, name: str, **kwargs):
        with self.tracer.start_as_current_span(name, kind=SpanKind.INTERNAL) as span:
            span.set_attributes({k: _attr(v) for k, v in self.context.items()})
            span.set_attributes({k: _attr(v) for k, v in kwargs.items()})
            yield span
