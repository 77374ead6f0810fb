import os
from typing import Optional
from pydantic import BaseModel, Field
from dotenv import load_dotenv

load_dotenv()


class Settings(BaseModel):
    """Process-level overrides read from the environment (and a .env file)."""
    output_dir: Optional[str] = Field(None, description="Overrides output.dir of every config")
    threads: int = Field(1, ge=1, description="Worker threads for per-radius and per-sample work")
    log_level: str = "INFO"
    otlp_endpoint: Optional[str] = None


def load_settings() -> Settings:
    return Settings(
        output_dir=os.environ.get("ZERODIFF_OUTPUT_DIR") or None,
        threads=int(os.environ.get("ZERODIFF_THREADS", "1")),
        log_level=os.environ.get("ZERODIFF_LOG_LEVEL", "INFO"),
        otlp_endpoint=os.environ.get("ZERODIFF_OTLP_ENDPOINT") or None,
    )
