import setuptools

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setuptools.setup(
    name="artgallery",
    version="0.1.0",
    install_requires=[
        'numpy>=1.22,<3',
        'scipy>=1.7,<2',
        'tqdm>=4.0,<5.0',
        'pyyaml>=6.0,<7',
        'networkx>=2.6,<4',
        'matplotlib>=3.5,<4',
    ],
    extras_require={
        'test': [
                    'pytest>=7.2.0,<8',
                    'pytest-cov>=2.10.1,<3',
                    'pytest-flake8>=1.1.1,<2',
                    'flake8>=4.0,<4.1',
                    'pytest-mypy>=0.10.0,<1',
                    'types-PyYAML',
                    'mock>=5.1,<6',
                    'types-mock>=5.1,<6',
                    'jsonschema>=4.0,<5',
                    'types-jsonschema',
                ]
    },
    entry_points={
        'console_scripts': ['artgallery=artgallery.cli:main'],
    },
    author="The artgallery Authors",
    description="Exact lower and upper bounds for minimum point guard covers of polygons with holes",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
    ],
    packages=setuptools.find_packages(exclude=["tests", "benchmark"]),
    package_data={"artgallery": ["resources/instances/*", "resources/schemas/*.json"]},
    include_package_data=True,
    python_requires=">=3.8",
)
