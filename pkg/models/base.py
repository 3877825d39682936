from pydantic import BaseModel, ConfigDict


class BaseDomainModel(BaseModel):
    """Base class for value records such as CheckReport and PicClass.

    Records are frozen once built so they can be shared between workers and
    serialized deterministically."""

    model_config = ConfigDict(frozen=True, extra="forbid")
