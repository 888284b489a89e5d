from setuptools import setup, find_packages

setup(
    name="cm-scope",
    version="1.0.0",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    py_modules=["main"],
    package_data={"config": ["*.yaml", "profiles/*.yaml"]},
    install_requires=[
        "numpy>=1.24.0",
        "pyyaml>=6.0",
        "intelhex>=2.3.0",
        "networkx>=3.0",
    ],
    entry_points={"console_scripts": ["cm-scope=main:main"]},
    python_requires='>=3.8',
)
