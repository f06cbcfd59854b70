#pragma once

#include "lpp/chains.hpp"
#include "lpp/errors.hpp"
#include "lpp/field.hpp"
#include "lpp/geometry.hpp"
#include "lpp/io.hpp"
#include "lpp/lab.hpp"
#include "lpp/oracle.hpp"
#include "lpp/profile.hpp"
#include "lpp/scaled.hpp"
#include "lpp/stats.hpp"
#include "lpp/tracy_widom.hpp"
