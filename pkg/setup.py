from setuptools import find_packages, setup

setup(
    name='telapa-lab',
    version='1.0.0',
    description='Continual reinforcement learning with per-task policy archives in a shared latent behavior space',
    packages=find_packages(include=['src', 'src.*']),
    python_requires='>=3.9',
    install_requires=[
        'numpy>=1.24.0',
        'python-dotenv>=1.0.0',
        'pandas>=2.0.0',
        'tabulate>=0.9.0',
        'colorama>=0.4.6',
    ],
    extras_require={'dev': ['pytest>=7.0.0', 'black>=23.0.0', 'pylint>=2.17.0']},
    entry_points={'console_scripts': ['telapa=src.interface.cli:main']},
)
