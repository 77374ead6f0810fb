from typing import Any, Callable, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field

from src.errors import ZeroDiffError
from util.log import Log
from util.status import Status

CheckKind = Literal['identity', 'count', 'trend', 'bound']
Outcome = Tuple[bool, Dict[str, Any]]


class Check(BaseModel):
    name: str
    description: str
    kind: CheckKind
    status: Status = Status.PENDING
    tags: List[str] = Field(default_factory=list, description="Tags for categorization")
    measured: Dict[str, Any] = Field(default_factory=dict, description="Values the verdict was taken on")
    detail: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status == Status.PASSED


def run_check(name: str, description: str, kind: CheckKind, fn: Callable[[], Outcome], log: Log,
              tags: Optional[List[str]] = None) -> Check:
    """
    Run fn and record its verdict. Library errors become a failed check carrying
    the error class and message; anything else propagates.
    """
    check = Check(name=name, description=description, kind=kind, tags=tags or [], status=Status.RUNNING)
    clog = log.with_context(check=name)
    with clog.trace("check", kind=kind):
        try:
            ok, measured = fn()
        except ZeroDiffError as e:
            return _raised(check, e, clog)
    check.measured = measured
    check.status = Status.PASSED if ok else Status.FAILED
    clog.info("check finished", status=check.status.value)
    return check


def _raised(check: Check, e: ZeroDiffError, clog: Log) -> Check:
    check.status = Status.FAILED
    check.detail = f"{type(e).__name__}: {e}"
    clog.error("check raised", error=type(e).__name__, detail=str(e))
    return check


def failed_check(name: str, description: str, e: ZeroDiffError, log: Log) -> Check:
    """A failed check standing for an error raised outside any check, e.g. while preparing the inputs."""
    check = Check(name=name, description=description, kind="identity")
    return _raised(check, e, log.with_context(check=name))
