static void leaf(void)
{
}

void caller(void)
{
    leaf();
}
