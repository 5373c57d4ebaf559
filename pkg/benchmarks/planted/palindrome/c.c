/* mirror compare from both ends */
int checkMirror(char *buf)
{
    int tail = 0;
    while (buf[tail] != '\0')
        tail++;
    tail--;
    int head = 0;
    while (head < tail) {
        if (buf[head] != buf[tail])
            return 0;
        head++;
        tail--;
    }
    return 1;
}
