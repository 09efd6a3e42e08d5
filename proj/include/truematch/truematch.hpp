#pragma once

#include "truematch/agreement.hpp"
#include "truematch/assignment.hpp"
#include "truematch/crosstab.hpp"
#include "truematch/fictitious.hpp"
#include "truematch/labels.hpp"
#include "truematch/lloyd.hpp"
#include "truematch/matching.hpp"
#include "truematch/matrix.hpp"
#include "truematch/mmcc.hpp"
#include "truematch/permutation.hpp"
#include "truematch/random.hpp"
#include "truematch/simulate.hpp"
