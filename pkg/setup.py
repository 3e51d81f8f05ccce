"""Build script: compiles the optional arbitrary-precision series kernel.

The kernel links against the same GMP/MPFR/MPC libraries that gmpy2
bundles or loads.  If Cython, the headers, or the libraries are missing
the build silently degrades to the pure-Python backend; nothing in the
package requires the extension at runtime.
"""

import glob
import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, otherwise warn and move on."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"cuspbasis: skipping compiled kernel ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"cuspbasis: skipping compiled kernel ({exc})")


def _link_arg(stem):
    # Prefer a plain -lfoo when the dev symlink exists, else pin the
    # soname so systems without *-dev packages still link.
    roots = ["/usr/lib", "/usr/lib/x86_64-linux-gnu", "/usr/local/lib", "/lib"]
    for root in roots:
        if os.path.exists(os.path.join(root, f"lib{stem}.so")):
            return f"-l{stem}"
    for root in roots:
        hits = sorted(glob.glob(os.path.join(root, f"lib{stem}.so.*")))
        if hits:
            return "-l:" + os.path.basename(hits[0])
    return f"-l{stem}"


def _extensions():
    if os.environ.get("CUSPBASIS_NO_EXT") == "1":
        return []
    try:
        import gmpy2
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:
        print(f"cuspbasis: compiled kernel prerequisites missing ({exc})")
        return []
    gmpy2_dir = os.path.dirname(gmpy2.__file__)
    ext = Extension(
        "cuspbasis._kernels._speedups",
        ["src/cuspbasis/_kernels/_speedups.pyx"],
        include_dirs=[gmpy2_dir],
        extra_link_args=[_link_arg("mpc"), _link_arg("mpfr"), _link_arg("gmp")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
