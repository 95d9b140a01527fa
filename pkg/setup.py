from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # numpy fallback kernel is used at runtime
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("ptqwalk._walkcore", ["src/ptqwalk/_walkcore.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
