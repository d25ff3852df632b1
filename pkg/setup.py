from setuptools import setup, find_packages
import os

# Parse version string
this_directory = os.path.dirname(os.path.abspath(__file__))
version_file = os.path.join(this_directory, "metreal", "_version.py")
exec(open(version_file).read())


setup(
    name="metreal",
    version=__version__,
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),

    install_requires=[
        'numba>=0.43.1',
        'numpy>=1.18.1',
        'scipy>=1.5.0',
        'pandas>=1.0.3',
        'tqdm>=4.46.0',
        'scikit-learn>=0.22.2',
    ],

    extras_require={
        'test': [
            'pytest>=6.0',
            'hypothesis>=5.0',
        ],
    },

    entry_points={
        'console_scripts': [
            'metreal = metreal.cli:main',
        ],
    },

    include_package_data=True,

    description="Finite metric realization of fuzzy simplicial sets, singular nerves and a desk-scale UMAP",
    keywords="umap fuzzy simplicial sets metric realization",
    url="",
    license=""
)
