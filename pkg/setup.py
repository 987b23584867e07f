from setuptools import setup, find_packages

setup(
    name="affine_compact",
    version="0.1",
    description="Affine jump processes on compact state spaces: jump counters, classification, Riccati transforms and exact simulation.",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    install_requires=["prefect", "pydantic>=2", "numpy", "scipy"],
    entry_points={"console_scripts": ["affine=affine_compact.cli:main"]},
)
