"""Under ctest, import the package from the CMake build tree.

HITCHIN_PYTHON_BUILD points at build/python. An editable install registers an
import hook that would otherwise shadow the freshly built module, so the
extension and the package are loaded from explicit file locations.
"""

import importlib.util
import os
import pathlib
import sys


def _load(name, path, search=None):
    spec = importlib.util.spec_from_file_location(name, path, submodule_search_locations=search)
    module = importlib.util.module_from_spec(spec)
    sys.modules[name] = module
    spec.loader.exec_module(module)
    return module


_build = os.environ.get("HITCHIN_PYTHON_BUILD")
if _build:
    _pkg = pathlib.Path(_build) / "hitchin_lab"
    _load("hitchin_lab._core", next(_pkg.glob("_core*.so")))
    _load("hitchin_lab", _pkg / "__init__.py", [str(_pkg)])
