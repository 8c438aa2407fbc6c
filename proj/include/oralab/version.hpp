#pragma once

#define ORALAB_VERSION_STRING "0.1.0"
