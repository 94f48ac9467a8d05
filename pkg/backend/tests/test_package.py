from app import __version__, get_package_info
from app.services import AVAILABLE_SERVICES, get_service_info, list_all_methods


def test_package_info():
    info = get_package_info()
    assert info["name"] == "PairCalib"
    assert info["version"] == __version__
    assert "Thresholded LIS verification" in info["supported_methods"]


def test_service_lookup():
    assert get_service_info("averaging")["methods"] == ["Weiszfeld", "median", "cc", "jcc"]
    assert get_service_info("unknown") is None
    assert get_service_info() is AVAILABLE_SERVICES


def test_methods_are_unique_and_sorted():
    methods = list_all_methods()
    assert methods == sorted(set(methods))
    assert "Weiszfeld" in methods
