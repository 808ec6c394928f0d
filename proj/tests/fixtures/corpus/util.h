#ifndef UTIL_H
#define UTIL_H

void init_system(void);
void run_loop(void);
int load_config(const char *path);
int parse_line(const char *s);
int tokenize(const char *s);
void *alloc_buffers(void);
void log_msg(const char *m);
int log_level(int x);
void step(int i);
int ready(void);
void dispatch(void);
int even(int n);

static inline int clamp(int v)
{
    return v < 0 ? 0 : v;
}

#endif
