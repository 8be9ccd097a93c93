# This file is part of wegnerlab.
#
# wegnerlab is free software: you can redistribute it and/or modify it under the terms of the GNU General
# Public License as published by the Free Software Foundation, either version 3 of the License, or (at your
# option) any later version.
#
# wegnerlab is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the
# implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License
# for more details.
#
# You should have received a copy of the GNU General Public License along with wegnerlab. If not, see
# <http://www.gnu.org/licenses/>.

BC_PERIODIC = 'periodic'
BC_DIRICHLET = 'dirichlet'
BC_NEUMANN = 'neumann'
BOUNDARY_CONDITIONS = (BC_PERIODIC, BC_DIRICHLET, BC_NEUMANN)

DENSITY_PIECEWISE_LINEAR = 'piecewise_linear'
DENSITY_UNIFORM = 'uniform'
DENSITY_KINDS = (DENSITY_PIECEWISE_LINEAR, DENSITY_UNIFORM)

MODE_CERTIFIED = 'certified'
MODE_VOLUME_FACTOR = 'volume_factor'
MODE_UNIFORM_DENSITY = 'uniform_density'
MODE_COLUMN_SUM = 'column_sum'
CONSTANT_MODES = (MODE_CERTIFIED, MODE_VOLUME_FACTOR, MODE_UNIFORM_DENSITY, MODE_COLUMN_SUM)

# one-sided 99% normal quantile used for upper confidence limits
Z_UCL99 = 2.576

# Matrices up to this many rows are stored densely.
DENSE_LIMIT = 4096

MIN_SAMPLES = 100
MIN_GRID_SPACING = 1e-4

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

SUBCOMMANDS = ('wegner', 'ids', 'dos', 'toeplitz', 'averaging', 'tails', 'two-scale')
