#pragma once

#include "gwlab/error.hpp"
#include "gwlab/partition.hpp"
#include "gwlab/tensor.hpp"
#include "gwlab/gw_states.hpp"
#include "gwlab/measures.hpp"
#include "gwlab/inequalities.hpp"
#include "gwlab/roof_oracle.hpp"
#include "gwlab/game_bounds.hpp"
#include "gwlab/io.hpp"
#include "gwlab/commands.hpp"
