#include "util.h"

int is_space(char c)
{
    return c == ' ' || c == '\t';
}

int tokenize(const char *s)
{
    return is_space(s[0]) + is_space(s[1]) + clamp(2);
}
