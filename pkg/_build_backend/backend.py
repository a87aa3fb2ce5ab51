"""PEP 517 backend: setuptools, configured from pyproject.toml only.

The top-level setup.py is the interactive bootstrap script, not a setuptools
configuration, so it must not be executed during a build.
"""

import setuptools
from setuptools.build_meta import _BuildMetaBackend


class _PyprojectOnlyBackend(_BuildMetaBackend):
    def run_setup(self, setup_script="setup.py"):
        setuptools.setup()


_BACKEND = _PyprojectOnlyBackend()

get_requires_for_build_wheel = _BACKEND.get_requires_for_build_wheel
get_requires_for_build_sdist = _BACKEND.get_requires_for_build_sdist
prepare_metadata_for_build_wheel = _BACKEND.prepare_metadata_for_build_wheel
build_wheel = _BACKEND.build_wheel
build_sdist = _BACKEND.build_sdist
get_requires_for_build_editable = _BACKEND.get_requires_for_build_editable
prepare_metadata_for_build_editable = _BACKEND.prepare_metadata_for_build_editable
build_editable = _BACKEND.build_editable
