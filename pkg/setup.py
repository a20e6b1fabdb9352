from setuptools import setup, find_packages

setup(
    name='dopolab',
    version='0.3.0',
    description='Quantum noise of a two-transverse-mode degenerate OPO: linearized theory and positive-P ensembles',
    long_description=open('README.md', encoding='utf-8').read(),
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=("tests", "docs", "examples")),
    install_requires=['numpy>=1.21', 'scipy', 'pandas', 'matplotlib', 'click', 'PyYAML'],
    extras_require={'test': ['pytest', 'hypothesis']},
    entry_points={'console_scripts': ['opo = dopolab.cli:cli']},
    classifiers=[
        'Programming Language :: Python :: 3',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
    ],
    python_requires='>=3.8',
)
