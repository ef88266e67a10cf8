from setuptools import find_packages, setup


def read_requirements(filename: str):
    with open(filename) as requirements_file:
        requirements = []
        for line in requirements_file:
            line = line.strip()
            if line.startswith("#") or len(line) <= 0:
                continue
            requirements.append(line)
    return requirements


setup(
    name="mermin-args",
    version="0.1.0",
    description="Generalised Mermin-type arguments, contextuality checks and secret sharing",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    keywords="contextuality mermin ghz all-versus-nothing secret-sharing",
    license="MIT",
    packages=find_packages(
        exclude=["test", "test.*", "*.tests", "*.tests.*", "tests.*", "tests"],
    ),
    install_requires=read_requirements("requirements.txt"),
    python_requires=">=3.9",
    entry_points={"console_scripts": ["mermin-args=mermin_args.cli:main"]},
)
