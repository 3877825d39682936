from models.base import BaseDomainModel
from models.certificate import Anchor, Certificate, CheckRecord
from models.pic_class import ClassContext, PicClass, ScrollDescriptor
from models.report import CheckEntry, CheckReport, CheckStatus

__all__ = [
    "BaseDomainModel",
    "Anchor",
    "Certificate",
    "CheckRecord",
    "ClassContext",
    "PicClass",
    "ScrollDescriptor",
    "CheckEntry",
    "CheckReport",
    "CheckStatus",
]
