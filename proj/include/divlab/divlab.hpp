#pragma once

#include "divlab/error.hpp"
#include "divlab/rational.hpp"
#include "divlab/subset.hpp"
#include "divlab/core.hpp"
#include "divlab/bounds.hpp"
#include "divlab/extension.hpp"
#include "divlab/homogeneity.hpp"
#include "divlab/tower.hpp"
#include "divlab/oracle.hpp"
#include "divlab/io.hpp"
