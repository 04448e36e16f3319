import setuptools

with open("README.md") as f:
    long_description = f.read()

setuptools.setup(
    name="burgess",
    version='0.3.0',
    author="The burgess developers",
    description="Experiments with Burgess-type bounds for mixed character "
                "sums",
    packages=setuptools.find_packages(exclude=["docs"]),
    package_data={
        'burgess': ['py.typed'],  # Mark package as having inline types
    },
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.22',
    ],
    entry_points={
        'console_scripts': [
            'pyburgess = burgess.cli:main',
        ],
    },
    license="ISC",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Development Status :: 3 - Alpha",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3 :: Only",
        "License :: OSI Approved :: ISC License (ISCL)",
    ],
    keywords="character sums burgess vinogradov number theory",
    include_package_data=True,
    zip_safe=False,
)
