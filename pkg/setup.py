from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "wavebound.kernels._stencil",
                ["src/wavebound/kernels/_stencil.pyx"],
                # no fast-math and no FP contraction: the compiled kernel
                # must stay bitwise identical to the numpy fallback
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
