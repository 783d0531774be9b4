"""
Exceptions 模块单元测试

测试自定义异常类。

运行方式:
    pytest tests/test_exceptions.py -v
"""
import pytest


class TestRoughTreesError:
    """测试基础异常类"""

    def test_create_basic_error(self):
        """测试创建基础错误"""
        from exceptions import RoughTreesError

        error = RoughTreesError("Something went wrong")

        assert str(error) == "Something went wrong"
        assert error.message == "Something went wrong"
        assert error.context == {}

    def test_create_error_with_context(self):
        """测试创建带上下文的错误"""
        from exceptions import RoughTreesError

        error = RoughTreesError("Operation failed", context={"operation": "sew", "N": 128})

        assert "Operation failed" in str(error)
        assert "operation=sew" in str(error)
        assert "N=128" in str(error)

    def test_error_is_exception(self):
        """测试错误可以被抛出和捕获"""
        from exceptions import RoughTreesError

        with pytest.raises(RoughTreesError) as exc_info:
            raise RoughTreesError("Test error")

        assert "Test error" in str(exc_info.value)


class TestResourceAndConfigErrors:
    """测试资源上限与配置异常"""

    def test_resource_cap_error(self):
        """测试资源上限错误携带限制信息"""
        from exceptions import ResourceCapError, RoughTreesError

        error = ResourceCapError("trees", limit=100, requested=250)

        assert error.resource == "trees"
        assert error.limit == 100
        assert error.requested == 250
        assert "resource=trees" in str(error)
        assert isinstance(error, RoughTreesError)

    def test_config_error(self):
        """测试配置错误"""
        from exceptions import ConfigError

        error = ConfigError("grid", "must be positive")

        assert error.config_name == "grid"
        assert error.reason == "must be positive"
        assert "config=grid" in str(error)


class TestDomainErrors:
    """测试各领域异常的继承关系"""

    def test_not_closed_error(self):
        """测试 NotClosedError 属于 SewingError"""
        from exceptions import NotClosedError, SewingError

        error = NotClosedError(defect=0.5, tolerance=1e-9)

        assert isinstance(error, SewingError)
        assert error.defect == 0.5
        assert "defect=5.000e-01" in str(error)

    def test_grid_mismatch_error(self):
        """测试 GridMismatchError 属于 IncrementError"""
        from exceptions import GridMismatchError, IncrementError

        error = GridMismatchError("cup", "different grids")

        assert isinstance(error, IncrementError)
        assert error.operation == "cup"

    def test_singular_exponent_error(self):
        """测试 SingularExponentError 属于 AlgebraError"""
        from exceptions import AlgebraError, SingularExponentError

        error = SingularExponentError("[0]", 1.0)

        assert isinstance(error, AlgebraError)
        assert error.gamma == 1.0

    def test_rough_path_errors(self):
        """测试粗糙路径异常"""
        from exceptions import (
            InsufficientDerivativeError,
            MissingLevelError,
            NonFiniteStateError,
            RoughPathError,
        )

        assert isinstance(MissingLevelError("[0: [1]]"), RoughPathError)
        error = InsufficientDerivativeError(needed=3, available=2)
        assert error.needed == 3
        assert isinstance(error, RoughPathError)
        assert NonFiniteStateError(step=4, time=0.5).step == 4

    def test_kdv_errors(self):
        """测试 KdV 异常"""
        from exceptions import BlowUpError, KdvError, ModeBudgetError

        error = BlowUpError(step=10, time=0.1, norm=1e9)
        assert isinstance(error, KdvError)
        assert error.norm == 1e9
        assert isinstance(ModeBudgetError(K=64, limit=32), KdvError)


class TestErrorPropagation:
    """测试错误传播"""

    def test_catch_specific_error(self):
        """测试捕获特定错误"""
        from exceptions import NotClosedError

        with pytest.raises(NotClosedError):
            raise NotClosedError(defect=1.0, tolerance=1e-9)

    def test_catch_base_error(self):
        """测试用基类捕获子类错误"""
        from exceptions import BlowUpError, RoughTreesError

        with pytest.raises(RoughTreesError):
            raise BlowUpError(step=1, time=0.0, norm=float("inf"))
