"""
错误类型

RankModError 及其子类都是输入/领域错误 (CLI 退出码 1),
InvariantViolation 表示内部不变量被破坏 (CLI 退出码 2)。
"""
from typing import Optional


class RankModError(ValueError):
    """领域/校验错误基类, 带机器可读的 code"""

    code = "domain_error"

    def __init__(self, message: str, code: Optional[str] = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ParameterError(RankModError):
    code = "invalid_parameters"


class GramError(RankModError):
    code = "invalid_gram"


class RankingError(RankModError):
    code = "invalid_ranking"


class WeightError(RankModError):
    code = "invalid_weights"


class FrameError(RankModError):
    code = "invalid_frame"


class DyckConfigurationError(RankModError):
    code = "dyck_configuration"

    def __init__(self, message: str, word: str):
        super().__init__(message)
        self.word = word


class CalibrationError(RankModError):
    code = "calibration_precondition"


class ConditionNotMet(RankModError):
    code = "condition_not_met"


class ResourceLimitError(RankModError):
    code = "resource_limit"


class InvariantViolation(RuntimeError):
    code = "invariant_violation"
